//! Integer and rational primitives: factorization, multiplicative functions,
//! the Kronecker symbol, p-adic valuations, and the two small quadratic
//! Diophantine solvers (Cornacchia, sums of two squares).
//!
//! Inputs are desk scale (< 2^63); primality is deterministic for all u64.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Prime factorization with primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    /// All positive divisors, sorted ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.pairs {
            let prev = out.clone();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                out.extend(prev.iter().map(|d| d * pe));
            }
        }
        out.sort_unstable();
        out
    }

    /// Largest m with m^2 dividing the input, together with the squarefree part.
    /// Returns (squarefree, m) with input = squarefree * m^2.
    pub fn square_split(&self) -> (u64, u64) {
        let mut sf = 1u64;
        let mut m = 1u64;
        for &(p, e) in &self.pairs {
            if e % 2 == 1 {
                sf *= p;
            }
            for _ in 0..e / 2 {
                m *= p;
            }
        }
        (sf, m)
    }

    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

/// Trial-division factorization. Deterministic; adequate for desk-scale input.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut n = n;
    let mut pairs = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0u32;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        pairs.push((n, 1));
    }
    Factorization { pairs }
}

/// Moebius function.
pub fn moebius(n: u64) -> i32 {
    let f = factorize(n);
    if f.pairs.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.pairs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisor power sum sigma_s(n) = sum over d | n of d^s, exact.
pub fn sigma_pow(s: u32, n: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for &(p, e) in &factorize(n).pairs {
        let pb = BigInt::from(p);
        let ps = pb.pow(s);
        let mut geom = BigInt::from(1);
        let mut term = BigInt::from(1);
        for _ in 0..e {
            term *= &ps;
            geom += &term;
        }
        acc *= geom;
    }
    acc
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Modular inverse of a mod m, if gcd(a, m) = 1.
pub(crate) fn modinv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin, correct for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    // This base set is deterministic for n < 3.3 * 10^24, so for all u64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Kronecker symbol (a/n), the full multiplicative extension of the Legendre
/// symbol: (a/2) depends on a mod 8, (a/-1) on the sign of a, (a/0) is nonzero
/// only for a = +-1.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut acc = 1i32;
    let mut n = n;
    if n < 0 {
        if a < 0 {
            acc = -acc;
        }
        n = -n;
    }
    let mut e = 0u32;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    if e > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) = 1 for a = +-1 mod 8, -1 for a = +-3 mod 8
        if e % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            acc = -acc;
        }
    }
    // now n odd positive; Jacobi via reciprocity
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                acc = -acc;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        a %= n;
    }
    if n == 1 {
        acc
    } else {
        0
    }
}

/// p-adic valuation, with a sentinel for the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadicValuation {
    Finite(i64),
    Infinite,
}

impl PadicValuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            PadicValuation::Finite(v) => Some(v),
            PadicValuation::Infinite => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == PadicValuation::Finite(0)
    }
}

impl std::fmt::Display for PadicValuation {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PadicValuation::Finite(v) => write!(out, "{v}"),
            PadicValuation::Infinite => write!(out, "inf"),
        }
    }
}

fn vp_bigint(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0i64;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// p-adic valuation of a rational; requires p prime.
pub fn vp(q: &BigRational, p: u64) -> Result<PadicValuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if q.is_zero() {
        return Ok(PadicValuation::Infinite);
    }
    // q is reduced, so at most one of numerator/denominator is divisible by p.
    let num = vp_bigint(q.numer(), p);
    if num > 0 {
        return Ok(PadicValuation::Finite(num));
    }
    Ok(PadicValuation::Finite(-vp_bigint(q.denom(), p)))
}

/// p-adic valuation of a nonzero integer given as i128 (Infinite for 0).
pub fn vp_int(n: i128, p: u64) -> PadicValuation {
    if n == 0 {
        return PadicValuation::Infinite;
    }
    let p = p as i128;
    let mut n = n;
    let mut v = 0i64;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    PadicValuation::Finite(v)
}

/// Parity of the Cohen index i in the decomposition (-1)^i n = d m^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(i: u32) -> Parity {
        if i % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Writes (-1)^i n = d m^2 with d equal to 1 or a fundamental discriminant
/// (positive for even parity, negative for odd). None exactly when
/// (-1)^i n = 2, 3 mod 4, the zero-coefficient case.
pub fn squarefree_decompose(n: u64, parity: Parity) -> Option<(i64, u64)> {
    assert!(n >= 1, "squarefree_decompose requires n >= 1");
    let (sf, m) = factorize(n).square_split();
    let sf = sf as i64;
    let m = m;
    // Even parity wants d > 0 with d = 1 mod 4 (or 4k); odd parity wants
    // -n = d m^2, so the signed squarefree part is -sf.
    let signed = match parity {
        Parity::Even => sf,
        Parity::Odd => -sf,
    };
    if signed.rem_euclid(4) == 1 {
        return Some((signed, m));
    }
    // signed = 2,3 mod 4: a fundamental discriminant needs the factor 4,
    // which must come out of m.
    if m % 2 == 0 {
        return Some((4 * signed, m / 2));
    }
    None
}

/// True for fundamental discriminants (1 is excluded).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let sf_abs = {
        let (sf, m) = factorize(d.unsigned_abs()).square_split();
        if m != 1 && !(m == 2 && d % 4 == 0) {
            return false;
        }
        sf
    };
    if d.rem_euclid(4) == 1 {
        // must be squarefree itself
        return sf_abs == d.unsigned_abs();
    }
    if d % 4 == 0 {
        let k = d / 4;
        let k_sf = factorize(k.unsigned_abs()).square_split().1 == 1;
        return k_sf && matches!(k.rem_euclid(4), 2 | 3);
    }
    false
}

/// All fundamental discriminants d with 1 < d <= max, ascending.
pub fn fundamental_discriminants_up_to(max: i64) -> Vec<i64> {
    (2..=max).filter(|&d| is_fundamental_discriminant(d)).collect()
}

pub(crate) fn isqrt_u64(n: u64) -> u64 {
    n.isqrt()
}

/// Some(r) with r*r = n, if n is a perfect square.
pub fn perfect_sqrt(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Square root of a mod odd prime p (Tonelli-Shanks). None if a is a
/// non-residue.
fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Representation ell = t a^2 + b^2 with a, b > 0, by Cornacchia's descent.
/// None when no representation exists. For t = 1 the pair is ordered a <= b.
pub fn cornacchia(t: u64, ell: u64) -> Result<Option<(u64, u64)>> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if t == 0 || t % ell == 0 {
        return Err(Error::InvalidArgument(format!(
            "cornacchia: t = {t} must be positive and not divisible by ell = {ell}"
        )));
    }
    if ell < 20 {
        // descent below assumes ell odd and roomy; settle tiny cases directly
        let mut a = 1u64;
        while t * a * a < ell {
            if let Some(b) = perfect_sqrt(ell - t * a * a) {
                if b > 0 {
                    return Ok(Some(normalize_cornacchia(t, a, b)));
                }
            }
            a += 1;
        }
        return Ok(None);
    }
    let neg_t = (ell - t % ell) % ell;
    let Some(r) = sqrt_mod_prime(neg_t, ell) else {
        return Ok(None);
    };
    let bound = isqrt_u64(ell);
    for root in [r, ell - r] {
        let mut x0 = ell;
        let mut x1 = root;
        while x1 > bound {
            let rem = x0 % x1;
            x0 = x1;
            x1 = rem;
        }
        if x1 == 0 {
            continue;
        }
        let rest = ell - x1 * x1;
        if rest % t != 0 {
            continue;
        }
        if let Some(a) = perfect_sqrt(rest / t) {
            if a > 0 {
                return Ok(Some(normalize_cornacchia(t, a, x1)));
            }
        }
    }
    Ok(None)
}

fn normalize_cornacchia(t: u64, a: u64, b: u64) -> (u64, u64) {
    if t == 1 && a > b {
        (b, a)
    } else {
        (a, b)
    }
}

/// True iff a^(p-1) = 1 mod p^2, the Wieferich condition for p in base a.
pub fn is_wieferich(p: u64, a: u64) -> Result<bool> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    if a < 2 {
        return Err(Error::InvalidArgument(format!(
            "is_wieferich: base a = {a} must be >= 2"
        )));
    }
    if a % p == 0 {
        return Err(Error::NotCoprime { a, b: p });
    }
    let p2 = p.checked_mul(p).ok_or_else(|| {
        Error::InvalidArgument(format!("is_wieferich: p^2 overflows for p = {p}"))
    })?;
    Ok(powmod(a % p2, p - 1, p2) == 1)
}

/// All ordered signed pairs (x, y) with x^2 + y^2 = n, x ascending, positive y
/// before negative. Empty iff some prime 3 mod 4 divides n to an odd power.
pub fn two_square_reps(n: u64) -> Vec<(i64, i64)> {
    assert!(n >= 1, "two_square_reps requires n >= 1");
    let s = isqrt_u64(n) as i64;
    let mut out = Vec::new();
    for x in -s..=s {
        let rest = n - (x * x) as u64;
        if let Some(y) = perfect_sqrt(rest) {
            if y == 0 {
                out.push((x, 0));
            } else {
                out.push((x, y as i64));
                out.push((x, -(y as i64)));
            }
        }
    }
    out
}
