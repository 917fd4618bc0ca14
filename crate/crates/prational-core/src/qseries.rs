//! Truncated q-expansions with exact rational coefficients, theta series,
//! and the operators acting on them: B_m, twist, residue restriction, Hecke
//! T(ell), and reduction to a residue series mod p^e.
//!
//! Precision is a contract: no operator fabricates coefficients beyond what
//! its inputs certify. Weight, level, and character are bookkeeping only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{is_prime, kronecker, mulmod, perfect_sqrt, squarefree_decompose, Parity};
use crate::dirichlet::{rational_mod, QuadCharacter};
use crate::error::{Error, Result};

/// q-expansion truncated at precision N: exactly N+1 coefficients.
/// weight2 stores twice the weight so half-integral weights stay integral.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    coeffs: Vec<BigRational>,
    pub weight2: i64,
    pub level: u64,
    pub character: QuadCharacter,
}

impl QExpansion {
    pub fn new(
        coeffs: Vec<BigRational>,
        weight2: i64,
        level: u64,
        character: QuadCharacter,
    ) -> Self {
        assert!(!coeffs.is_empty(), "a q-expansion certifies at least its constant term");
        QExpansion { coeffs, weight2, level, character }
    }

    pub fn zero(prec: usize, weight2: i64, level: u64, character: QuadCharacter) -> Self {
        QExpansion::new(vec![BigRational::zero(); prec + 1], weight2, level, character)
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient-wise sum at the shared certified precision.
    pub fn add(&self, other: &QExpansion) -> QExpansion {
        let prec = self.prec().min(other.prec());
        let coeffs = (0..=prec)
            .map(|n| self.coeffs[n].clone() + &other.coeffs[n])
            .collect();
        QExpansion::new(
            coeffs,
            self.weight2,
            self.level.lcm(&other.level),
            self.character.product_label(other.character),
        )
    }

    pub fn scale(&self, c: &BigRational) -> QExpansion {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        QExpansion::new(coeffs, self.weight2, self.level, self.character)
    }

    /// Truncate to a smaller precision.
    pub fn truncate(&self, prec: usize) -> QExpansion {
        assert!(prec <= self.prec());
        QExpansion::new(
            self.coeffs[..=prec].to_vec(),
            self.weight2,
            self.level,
            self.character,
        )
    }
}

/// Residue series: coefficients mod p^e, every entry in [0, p^e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSeries {
    pub coeffs: Vec<u64>,
    pub p: u64,
    pub e: u32,
}

impl ResidueSeries {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Drop guard digits: reduce each entry from p^e to p^e'.
    pub fn reduce_to(&self, e: u32) -> ResidueSeries {
        assert!(e >= 1 && e <= self.e);
        let m = self.p.pow(e);
        ResidueSeries {
            coeffs: self.coeffs.iter().map(|&c| c % m).collect(),
            p: self.p,
            e,
        }
    }
}

/// Cauchy product truncated to the smaller operand precision. Zero
/// coefficients of the sparser factor are skipped; the result is identical
/// to the dense double loop.
pub fn qs_mul(f: &QExpansion, g: &QExpansion) -> QExpansion {
    let prec = f.prec().min(g.prec());
    let (outer, inner) = {
        let nf = f.coeffs.iter().take(prec + 1).filter(|c| !c.is_zero()).count();
        let ng = g.coeffs.iter().take(prec + 1).filter(|c| !c.is_zero()).count();
        if nf <= ng { (f, g) } else { (g, f) }
    };
    let mut coeffs = vec![BigRational::zero(); prec + 1];
    for (i, a) in outer.coeffs.iter().enumerate().take(prec + 1) {
        if a.is_zero() {
            continue;
        }
        for (j, b) in inner.coeffs.iter().enumerate().take(prec + 1 - i) {
            if b.is_zero() {
                continue;
            }
            coeffs[i + j] += a * b;
        }
    }
    QExpansion::new(
        coeffs,
        f.weight2 + g.weight2,
        f.level.lcm(&g.level),
        f.character.product_label(g.character),
    )
}

/// theta_t = 1 + 2 sum_{n>=1} q^(t n^2), weight 1/2, level 4t.
/// Character metadata: the character attached to the fundamental part of t,
/// trivial when t has no valid decomposition (metadata is advisory).
pub fn theta_t(t: u64, prec: usize) -> QExpansion {
    assert!(t >= 1, "theta_t requires t >= 1");
    let character = squarefree_decompose(t, Parity::Even)
        .and_then(|(d, _)| QuadCharacter::new(d).ok())
        .unwrap_or_else(QuadCharacter::trivial);
    let mut f = QExpansion::zero(prec, 1, 4 * t, character);
    f.coeffs[0] = BigRational::from(BigInt::from(1));
    let mut n = 1u64;
    while let Some(idx) = t.checked_mul(n * n).filter(|&i| i <= prec as u64) {
        f.coeffs[idx as usize] = BigRational::from(BigInt::from(2));
        n += 1;
    }
    f
}

/// f|B_m: keeps coefficients at indices divisible by m (in place, no
/// reindexing), zeroes the rest. Level gains a factor m^2.
pub fn op_b(f: &QExpansion, m: u64) -> QExpansion {
    assert!(m >= 1, "op_b requires m >= 1");
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| if n as u64 % m == 0 { a.clone() } else { BigRational::zero() })
        .collect();
    QExpansion::new(coeffs, f.weight2, f.level * m * m, f.character)
}

/// Twist: a(n) -> psi(n) a(n) for n >= 1, constant term 0.
/// Level gains the square of the twisting conductor; the nebentypus label is
/// unchanged because psi is quadratic (psi^2 is principal).
pub fn op_twist(f: &QExpansion, psi: QuadCharacter) -> QExpansion {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| {
            if n == 0 {
                BigRational::zero()
            } else {
                match psi.eval(n as i64) {
                    0 => BigRational::zero(),
                    1 => a.clone(),
                    _ => -a.clone(),
                }
            }
        })
        .collect();
    let d = psi.conductor();
    QExpansion::new(coeffs, f.weight2, f.level * d * d, f.character)
}

/// Restriction to quadratic residues mod ell: keeps exactly the coefficients
/// with (n/ell) = 1. Equal (a test obligation) to the composed operator
/// (f - f|B_ell)/2 + (f - f|B_ell)_psi/2 with psi = (./ell). Level gains
/// ell^4.
pub fn op_restrict(f: &QExpansion, ell: u64) -> Result<QExpansion> {
    if !is_prime(ell) || ell == 2 {
        return Err(Error::InvalidArgument(format!(
            "op_restrict: ell = {ell} must be an odd prime"
        )));
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| {
            if kronecker(n as i64, ell as i64) == 1 {
                a.clone()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    Ok(QExpansion::new(
        coeffs,
        f.weight2,
        f.level * ell.pow(4),
        f.character,
    ))
}

/// Hecke T(ell) at integral weight k: c'(n) = c(n ell) + psi(ell) ell^(k-1) c(n/ell),
/// the second term present exactly when ell | n (n = 0 counts as divisible).
/// Output precision contracts to floor(N/ell).
pub fn hecke(f: &QExpansion, ell: u64, weight_k: u32, psi: QuadCharacter) -> Result<QExpansion> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if (f.prec() as u64) < ell {
        return Err(Error::PrecisionTooSmall { required: ell as usize, have: f.prec() });
    }
    assert!(weight_k >= 1, "hecke requires weight k >= 1");
    let out_prec = f.prec() / ell as usize;
    let scale = BigRational::from(BigInt::from(ell).pow(weight_k - 1))
        * BigRational::from(BigInt::from(psi.eval(ell as i64)));
    let coeffs = (0..=out_prec)
        .map(|n| {
            let mut c = f.coeffs[n * ell as usize].clone();
            if n as u64 % ell == 0 {
                c += &scale * &f.coeffs[n / ell as usize];
            }
            c
        })
        .collect();
    Ok(QExpansion::new(coeffs, f.weight2, f.level, f.character))
}

/// Hecke T(ell) on a residue series, same conventions as `hecke`.
pub fn hecke_residue(
    f: &ResidueSeries,
    ell: u64,
    weight_k: u32,
    psi: QuadCharacter,
) -> Result<ResidueSeries> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if (f.prec() as u64) < ell {
        return Err(Error::PrecisionTooSmall { required: ell as usize, have: f.prec() });
    }
    let pe = f.modulus();
    let lpow = crate::arith::powmod(ell, (weight_k - 1) as u64, pe);
    let scale = match psi.eval(ell as i64) {
        0 => 0,
        1 => lpow,
        _ => (pe - lpow) % pe,
    };
    let out_prec = f.prec() / ell as usize;
    let coeffs = (0..=out_prec)
        .map(|n| {
            let mut c = f.coeffs[n * ell as usize];
            if n as u64 % ell == 0 {
                c = (c + mulmod(scale, f.coeffs[n / ell as usize], pe)) % pe;
            }
            c
        })
        .collect();
    Ok(ResidueSeries { coeffs, p: f.p, e: f.e })
}

/// Coefficient-wise reduction mod p^e. Every denominator must be invertible;
/// the first offending index is reported so callers know to switch to a
/// p-cleared series.
pub fn reduce_mod(f: &QExpansion, p: u64, e: u32) -> Result<ResidueSeries> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pe = p
        .checked_pow(e)
        .filter(|_| e >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("reduce_mod: p^e overflows for p = {p}, e = {e}")))?;
    let mut coeffs = Vec::with_capacity(f.prec() + 1);
    for (n, a) in f.coeffs.iter().enumerate() {
        match reduce_coeff(a, p, pe) {
            Some(r) => coeffs.push(r),
            None => return Err(Error::DenominatorNotInvertible(n)),
        }
    }
    Ok(ResidueSeries { coeffs, p, e })
}

fn reduce_coeff(a: &BigRational, p: u64, pe: u64) -> Option<u64> {
    if a.denom().mod_floor(&BigInt::from(p)).is_zero() {
        return None;
    }
    rational_mod(a, pe)
}

/// r_3-style brute force helper used by tests: not exposed; see theta_t.
#[allow(dead_code)]
fn lattice_r3(n: u64) -> u64 {
    let s = (n as f64).sqrt() as i64 + 1;
    let mut count = 0u64;
    for x in -s..=s {
        for y in -s..=s {
            let rest = n as i64 - x * x - y * y;
            if rest < 0 {
                continue;
            }
            if let Some(z) = perfect_sqrt(rest as u64) {
                count += if z == 0 { 1 } else { 2 };
            }
        }
    }
    count
}
