//! Cohen coefficients h(i, n), their generating series, the p-cleared series
//! H1 (coefficients p·h(p-1, n) with multiples of p removed), and the
//! residue-restricted series G.
//!
//! Two routes exist to h1 mod p^e: reduce the exact rational series, or
//! stream residues through the modular Bernoulli kernel. Both are kept and
//! must agree; the exact route is authoritative.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{is_prime, kronecker, modinv, mulmod, squarefree_decompose, Parity};
use crate::dirichlet::{
    eps_sigma, eps_sigma_mod, gen_bernoulli_pm1_mod_with, l_neg, rational_mod, QuadCharacter,
};
use crate::error::{Error, Result};
use crate::qseries::{op_restrict, QExpansion, ResidueSeries};

/// Weight index i of the half-integral weight i + 1/2 series. i = 1 is
/// excluded: the construction needs i >= 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CohenIndex(u32);

impl CohenIndex {
    pub fn new(i: u32) -> Result<Self> {
        if i < 2 {
            return Err(Error::InvalidArgument(format!(
                "cohen index must be >= 2, got {i}"
            )));
        }
        Ok(CohenIndex(i))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// h(i, n): zeta(1-2i) at n = 0; zero unless (-1)^i n is 0 or 1 mod 4;
/// otherwise L(1-i, chi_d) times the eps*sigma correction for the
/// decomposition (-1)^i n = d m^2.
pub fn h_coeff(i: CohenIndex, n: u64) -> BigRational {
    let i = i.get();
    if n == 0 {
        return l_neg(2 * i, QuadCharacter::trivial())
            .expect("2i >= 4 is always a valid L argument")
            .value;
    }
    let Some((d, m)) = squarefree_decompose(n, Parity::of(i)) else {
        return BigRational::zero();
    };
    let chi = QuadCharacter::new(d).expect("decomposition yields 1 or a fundamental discriminant");
    let l = l_neg(i, chi).expect("i >= 2 never hits the rejected (1, trivial) case");
    l.value * eps_sigma(d, i, m)
}

/// The series sum h(i, n) q^n to precision `prec`. Weight i + 1/2, level 4.
pub fn h_series(i: CohenIndex, prec: usize) -> QExpansion {
    let coeffs = (0..=prec as u64).map(|n| h_coeff(i, n)).collect();
    QExpansion::new(coeffs, 2 * i.get() as i64 + 1, 4, QuadCharacter::trivial())
}

fn check_h1_prime(p: u64) -> Result<CohenIndex> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::InvalidArgument(format!(
            "h1 requires p >= 5, got {p}"
        )));
    }
    CohenIndex::new((p - 1) as u32)
}

/// h1(p-1, n) = p·h(p-1, n) for p coprime to n, 0 when p | n (n = 0
/// included). Every coefficient is p-integral: the p in the denominator of
/// the L-value is cleared by the leading p.
pub fn h1_series(p: u64, prec: usize) -> Result<QExpansion> {
    let i = check_h1_prime(p)?;
    let pr = BigRational::from(BigInt::from(p));
    let coeffs = (0..=prec as u64)
        .map(|n| {
            if n % p == 0 {
                BigRational::zero()
            } else {
                &pr * h_coeff(i, n)
            }
        })
        .collect();
    Ok(QExpansion::new(
        coeffs,
        2 * i.get() as i64 + 1,
        4 * p * p,
        QuadCharacter::trivial(),
    ))
}

pub(crate) fn check_restriction_primes(p: u64, l: &[u64]) -> Result<()> {
    for (k, &ell) in l.iter().enumerate() {
        if !is_prime(ell) || ell == 2 {
            return Err(Error::InvalidArgument(format!(
                "restriction prime {ell} must be an odd prime"
            )));
        }
        if ell == p {
            return Err(Error::InvalidArgument(format!(
                "restriction prime {ell} must differ from p"
            )));
        }
        if l[..k].contains(&ell) {
            return Err(Error::InvalidArgument(format!(
                "restriction prime {ell} repeated"
            )));
        }
    }
    Ok(())
}

/// G = h1 restricted to indices that are quadratic residues mod every prime
/// in `l`. Level metadata compounds to 4 p^2 prod ell^4.
pub fn g_series(p: u64, l: &[u64], prec: usize) -> Result<QExpansion> {
    check_restriction_primes(p, l)?;
    let mut g = h1_series(p, prec)?;
    for &ell in l {
        g = op_restrict(&g, ell)?;
    }
    Ok(g)
}

fn spf_sieve(n: usize) -> Vec<u32> {
    assert!(n < (1 << 31), "sieve index must fit u32");
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                match j.checked_add(i) {
                    Some(next) => j = next,
                    None => break,
                }
            }
        }
    }
    spf
}

/// (squarefree kernel, square part root) from the factor sieve.
fn split_square_spf(mut n: u64, spf: &[u32]) -> (u64, u64) {
    let mut s = 1u64;
    let mut m = 1u64;
    while n > 1 {
        let q = spf[n as usize] as u64;
        let mut e = 0u32;
        while n % q == 0 {
            n /= q;
            e += 1;
        }
        if e % 2 == 1 {
            s *= q;
        }
        m *= q.pow(e / 2);
    }
    (s, m)
}

/// Streaming residue route: h1(p-1, n) mod p^e for all n <= prec, without
/// materializing exact rationals. Distinct fundamental discriminants are the
/// cost centers; each L-value residue is computed once by the modular
/// Bernoulli kernel and reused across the square multiples of its d.
pub fn h1_residues(p: u64, e: u32, prec: usize) -> Result<ResidueSeries> {
    check_h1_prime(p)?;
    if e == 0 {
        return Err(Error::InvalidArgument("h1_residues requires e >= 1".into()));
    }
    let pe = p
        .checked_pow(e)
        .filter(|&m| m < 1 << 32)
        .ok_or_else(|| Error::InvalidArgument(format!(
            "h1_residues: p^e out of range for p = {p}, e = {e}"
        )))?;

    let spf = spf_sieve(prec);
    let mut by_d: BTreeMap<u64, Vec<(usize, u64)>> = BTreeMap::new();
    for n in 1..=prec as u64 {
        if n % p == 0 {
            continue;
        }
        let (s, m) = split_square_spf(n, &spf);
        let (d, m) = if s % 4 == 1 {
            (s, m)
        } else if m % 2 == 0 {
            (4 * s, m / 2)
        } else {
            continue;
        };
        by_d.entry(d).or_default().push((n as usize, m));
    }

    // p·zeta(2-p) is a p-adic unit; it anchors the d = 1 column.
    let p_zeta = BigRational::from(BigInt::from(p))
        * l_neg((p - 1) as u32, QuadCharacter::trivial())?.value;
    let p_zeta_mod = rational_mod(&p_zeta, pe)
        .expect("p zeta(2-p) has denominator coprime to p");

    let pm1_inv = modinv((p - 1) % pe, pe).expect("p-1 invertible mod p^e");
    let groups: Vec<(u64, Vec<(usize, u64)>)> = by_d.into_iter().collect();
    // chi tables run to the conductor, which reaches 4x the sieve range
    let spf_chi = spf_sieve(groups.last().map_or(0, |(d, _)| *d as usize));
    let chunks: Vec<Vec<(usize, u64)>> = groups
        .par_iter()
        .map(|(d, entries)| {
            // col = p·L(2-p, chi_d) mod p^e. For d = 1 the factor p is what
            // cancels the pole in zeta(2-p), so it never appears alone.
            let col = if *d == 1 {
                p_zeta_mod
            } else {
                let f = *d;
                let mut chi = vec![0i8; f as usize + 1];
                chi[1] = 1;
                for a in 2..=f as usize {
                    let q = spf_chi[a] as usize;
                    chi[a] = if q == a {
                        kronecker(*d as i64, a as i64) as i8
                    } else {
                        chi[q] * chi[a / q]
                    };
                }
                let b = gen_bernoulli_pm1_mod_with(p, e, f, |a| chi[a as usize] as i32);
                mulmod(p % pe, mulmod((pe - b) % pe, pm1_inv, pe), pe)
            };
            entries
                .iter()
                .map(|&(n, m)| {
                    let eps = eps_sigma_mod(*d as i64, (p - 1) as u32, m, pe);
                    (n, mulmod(col, eps, pe))
                })
                .collect()
        })
        .collect();

    let mut coeffs = vec![0u64; prec + 1];
    for chunk in chunks {
        for (n, v) in chunk {
            coeffs[n] = v;
        }
    }
    Ok(ResidueSeries { coeffs, p, e })
}

/// Residue-route G: h1_residues with indices outside the residue set zeroed.
pub fn g_residues(p: u64, l: &[u64], e: u32, prec: usize) -> Result<ResidueSeries> {
    check_restriction_primes(p, l)?;
    let mut g = h1_residues(p, e, prec)?;
    if l.is_empty() {
        return Ok(g);
    }
    for (n, c) in g.coeffs.iter_mut().enumerate() {
        if *c != 0 && !l.iter().all(|&ell| kronecker(n as i64, ell as i64) == 1) {
            *c = 0;
        }
    }
    Ok(g)
}
