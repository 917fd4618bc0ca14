//! Quadratic Dirichlet characters, classical and generalized Bernoulli
//! numbers, special L-values L(1-i, chi) at non-positive integers, and the
//! eps*sigma divisor convolution.
//!
//! Two evaluation routes exist for L(2-p, chi): the exact Bernoulli-polynomial
//! sum (authoritative) and a mod p^e kernel for bulk scans. Tests hold them to
//! agreement on samples.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    factorize, is_fundamental_discriminant, is_prime, kronecker, moebius, modinv, mulmod,
    sigma_pow,
};
use crate::error::{Error, Result};

/// Quadratic character chi_D evaluated through the Kronecker symbol (D/.).
/// D is 1 (the trivial character) or a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadCharacter {
    d: i64,
}

impl QuadCharacter {
    pub fn new(d: i64) -> Result<Self> {
        if d == 1 || is_fundamental_discriminant(d) {
            Ok(QuadCharacter { d })
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn trivial() -> Self {
        QuadCharacter { d: 1 }
    }

    pub fn d(self) -> i64 {
        self.d
    }

    /// Conductor |D|.
    pub fn conductor(self) -> u64 {
        self.d.unsigned_abs()
    }

    pub fn is_trivial(self) -> bool {
        self.d == 1
    }

    /// chi(-1) = 1 exactly when D > 0.
    pub fn is_even(self) -> bool {
        self.d > 0
    }

    pub fn eval(self, n: i64) -> i32 {
        kronecker(self.d, n)
    }

    /// Label of the product character chi_D * chi_D': the character attached
    /// to the fundamental part of D*D'. Bookkeeping for series metadata.
    pub fn product_label(self, other: QuadCharacter) -> QuadCharacter {
        let prod = self.d as i128 * other.d as i128;
        let sign = if prod < 0 { -1i64 } else { 1 };
        let (sf, _) = factorize(prod.unsigned_abs().try_into().expect("product conductor fits u64"))
            .square_split();
        let signed = sign * sf as i64;
        if signed == 1 {
            QuadCharacter::trivial()
        } else if signed.rem_euclid(4) == 1 {
            QuadCharacter { d: signed }
        } else {
            QuadCharacter { d: 4 * signed }
        }
    }
}

static BERNOULLI: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();

/// Classical Bernoulli number, B_1 = -1/2 convention.
pub fn bernoulli(n: u32) -> BigRational {
    let lock = BERNOULLI.get_or_init(|| RwLock::new(vec![BigRational::one()]));
    {
        let table = lock.read().unwrap();
        if let Some(b) = table.get(n as usize) {
            return b.clone();
        }
    }
    let mut table = lock.write().unwrap();
    while table.len() <= n as usize {
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        let m = table.len();
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in table.iter().enumerate() {
            acc += BigRational::from(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let b = -acc / BigRational::from(BigInt::from(m as u64 + 1));
        table.push(b);
    }
    table[n as usize].clone()
}

/// Character power sums T_j = sum_{a=1..f} chi(a) a^j for j = 0..=n.
fn power_sums(n: u32, chi: QuadCharacter) -> Vec<BigInt> {
    let f = chi.conductor();
    let bits = u64::BITS - f.leading_zeros();
    if (n + 2) * bits < 126 {
        // everything fits i128: |sum| <= f^(n+1)
        let mut sums = vec![0i128; n as usize + 1];
        for a in 1..=f {
            let c = chi.eval(a as i64);
            if c == 0 {
                continue;
            }
            let mut aj = 1i128;
            sums[0] += c as i128;
            for s in sums.iter_mut().skip(1) {
                aj *= a as i128;
                *s += c as i128 * aj;
            }
        }
        sums.into_iter().map(BigInt::from).collect()
    } else {
        let mut sums = vec![BigInt::zero(); n as usize + 1];
        for a in 1..=f {
            let c = chi.eval(a as i64);
            if c == 0 {
                continue;
            }
            let mut aj = BigInt::one();
            for s in sums.iter_mut() {
                if c > 0 {
                    *s += &aj;
                } else {
                    *s -= &aj;
                }
                aj *= a;
            }
        }
        sums
    }
}

/// Generalized Bernoulli number B_{n,chi} = f^(n-1) sum_{a=1..f} chi(a) B_n(a/f),
/// expanded through the Bernoulli polynomial into power sums:
/// sum_{k=0..n} C(n,k) B_k f^(k-1) T_{n-k}.
pub fn gen_bernoulli(n: u32, chi: QuadCharacter) -> BigRational {
    assert!(n >= 1, "gen_bernoulli requires n >= 1");
    let t = power_sums(n, chi);
    let f = BigInt::from(chi.conductor());
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    for k in 0..=n {
        acc += BigRational::from(binom.clone())
            * bernoulli(k)
            * BigRational::new(f.pow(k), f.clone())
            * BigRational::from(t[(n - k) as usize].clone());
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    acc
}

/// The special value L(1-i, chi_D) together with its defining data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LValue {
    pub i: u32,
    pub d: i64,
    pub value: BigRational,
}

static L_CACHE: OnceLock<RwLock<HashMap<(u32, i64), BigRational>>> = OnceLock::new();

/// L(1-i, chi_D) = -B_{i,chi}/i; zeta(1-i) when D = 1. Values are memoized
/// by (i, D) since scans revisit each discriminant many times.
///
/// The (i = 1, D = 1) corner sits next to the zeta pole and is rejected.
pub fn l_neg(i: u32, chi: QuadCharacter) -> Result<LValue> {
    if i == 0 {
        return Err(Error::InvalidArgument("l_neg: i must be >= 1".into()));
    }
    if i == 1 && chi.is_trivial() {
        return Err(Error::InvalidArgument(
            "l_neg: (i = 1, D = 1) is rejected".into(),
        ));
    }
    let key = (i, chi.d());
    let cache = L_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&key) {
        return Ok(LValue { i, d: chi.d(), value: v.clone() });
    }
    let value = -gen_bernoulli(i, chi) / BigRational::from(BigInt::from(i));
    cache
        .write()
        .unwrap()
        .entry(key)
        .or_insert_with(|| value.clone());
    Ok(LValue { i, d: chi.d(), value })
}

/// Class number of the imaginary quadratic field of discriminant d < 0,
/// from h = w * L(0, chi_d) / 2 with w in {6, 4, 2}.
pub fn class_number_imag(d: i64) -> Result<u64> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let w = match d {
        -3 => 6u64,
        -4 => 4,
        _ => 2,
    };
    let l0 = l_neg(1, QuadCharacter::new(d)?)?.value;
    let h = l0 * BigRational::new(BigInt::from(w), BigInt::from(2));
    assert!(
        h.is_integer() && h.is_positive(),
        "class number relation must yield a positive integer for d = {d}"
    );
    Ok(h.to_integer().to_u64().expect("class number fits u64"))
}

/// The convolution sum_{r|m} mu(r) chi_d(r) r^(i-1) sigma_{2i-1}(m/r).
///
/// d is the signed discriminant produced by squarefree_decompose (1 allowed),
/// so the character here is chi_d itself. Integer-valued; typed rational to
/// match the L-value algebra it multiplies into.
pub fn eps_sigma(d: i64, i: u32, m: u64) -> BigRational {
    assert!(i >= 1, "eps_sigma requires i >= 1");
    assert!(m >= 1, "eps_sigma requires m >= 1");
    debug_assert!(d == 1 || is_fundamental_discriminant(d));
    let mut acc = BigInt::zero();
    for r in factorize(m).divisors() {
        let c = moebius(r) * kronecker(d, r as i64);
        if c == 0 {
            continue;
        }
        let term = BigInt::from(r).pow(i - 1) * sigma_pow(2 * i - 1, m / r);
        if c > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    BigRational::from(acc)
}

/// sigma_s(q^k) mod pe.
fn sigma_prime_power_mod(s: u32, q: u64, k: u32, pe: u64) -> u64 {
    let qs = crate::arith::powmod(q, s as u64, pe);
    let mut acc = 1 % pe;
    let mut term = 1 % pe;
    for _ in 0..k {
        term = mulmod(term, qs, pe);
        acc = (acc + term) % pe;
    }
    acc
}

/// eps_sigma reduced mod pe, via the prime-power factorization of the
/// multiplicative convolution.
pub(crate) fn eps_sigma_mod(d: i64, i: u32, m: u64, pe: u64) -> u64 {
    let mut acc = 1 % pe;
    for (q, k) in factorize(m).pairs {
        let full = sigma_prime_power_mod(2 * i - 1, q, k, pe);
        let local = match kronecker(d, q as i64) {
            0 => full,
            c => {
                let shifted = mulmod(
                    crate::arith::powmod(q, (i - 1) as u64, pe),
                    sigma_prime_power_mod(2 * i - 1, q, k - 1, pe),
                    pe,
                );
                if c > 0 {
                    (full + pe - shifted) % pe
                } else {
                    (full + shifted) % pe
                }
            }
        };
        acc = mulmod(acc, local, pe);
    }
    acc
}

/// Image of a rational with denominator invertible mod pe.
pub(crate) fn rational_mod(q: &BigRational, pe: u64) -> Option<u64> {
    let m = BigInt::from(pe);
    let num = q.numer().mod_floor(&m).to_u64()?;
    let den = q.denom().mod_floor(&m).to_u64()?;
    Some(mulmod(num, modinv(den, pe)?, pe))
}

/// B_{p-1, chi} mod p^e for a nontrivial character given by `chi_at`, with
/// conductor f coprime to p.
///
/// The k = p-1 term of the binomial expansion carries the non-p-integral
/// B_{p-1} but multiplies T_0 = sum chi(a) = 0, so the sum stops at p-2,
/// where every B_k is p-integral by von Staudt-Clausen.
pub(crate) fn gen_bernoulli_pm1_mod_with(
    p: u64,
    e: u32,
    f: u64,
    chi_at: impl Fn(u64) -> i32,
) -> u64 {
    let pe = p.checked_pow(e).expect("p^e fits u64");
    assert!(pe < 1 << 32, "plain u64 products below need pe < 2^32");
    let mut t = vec![0u64; p as usize]; // t[j] = T_j lazily reduced, j = 1..=p-1
    for a in 1..=f {
        let c = chi_at(a);
        if c == 0 {
            continue;
        }
        let am = a % pe;
        let mut aj = 1u64;
        for tj in t.iter_mut().skip(1) {
            aj = aj * am % pe;
            // each summand is < pe < 2^32, so the running sum only needs a
            // reduction once it crosses 2^63, not on every add
            *tj += if c > 0 { aj } else { pe - aj };
            if *tj >= 1 << 63 {
                *tj %= pe;
            }
        }
    }
    for tj in t.iter_mut() {
        *tj %= pe;
    }
    let mut acc = 0u64;
    let mut fpow = modinv(f % pe, pe).expect("conductor invertible mod p^e"); // f^(k-1)
    let mut binom = BigInt::one(); // C(p-1, k)
    for k in 0..=(p - 2) {
        let bk = rational_mod(&bernoulli(k as u32), pe)
            .expect("B_k is p-integral for k <= p-2");
        let c_mod = binom.mod_floor(&BigInt::from(pe)).to_u64().unwrap();
        let term = mulmod(mulmod(c_mod, bk, pe), mulmod(fpow, t[(p - 1 - k) as usize], pe), pe);
        acc = (acc + term) % pe;
        binom = binom * BigInt::from(p - 1 - k) / BigInt::from(k + 1);
        fpow = fpow * (f % pe) % pe;
    }
    acc
}

/// L(2-p, chi_D) mod p^e by the modular Bernoulli kernel. Requires D
/// fundamental with gcd(D, p) = 1; the exact path stays authoritative.
pub fn l_neg_pm1_mod(p: u64, e: u32, chi: QuadCharacter) -> Result<u64> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    if e == 0 || p.checked_pow(e).is_none_or(|pe| pe >= 1 << 32) {
        return Err(Error::InvalidArgument(format!(
            "l_neg_pm1_mod: p^e out of range for p = {p}, e = {e}"
        )));
    }
    if chi.is_trivial() {
        return Err(Error::InvalidArgument(
            "l_neg_pm1_mod: zeta(2-p) has a p in the denominator; use the exact path".into(),
        ));
    }
    if chi.conductor() % p == 0 {
        return Err(Error::NotCoprime { a: chi.conductor(), b: p });
    }
    let pe = p.pow(e);
    let b = gen_bernoulli_pm1_mod_with(p, e, chi.conductor(), |a| chi.eval(a as i64));
    let inv = modinv((p - 1) % pe, pe).expect("p-1 invertible mod p^e");
    Ok(mulmod((pe - b) % pe, inv, pe))
}
