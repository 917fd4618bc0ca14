//! The p = 5 production machinery: the weight-5 divisor-sum identity, the
//! discriminant finder attached to products 2·ell·ell', the congruence sieve
//! for auxiliary primes, and the driver that manufactures a 5-rational
//! discriminant outside any given finite list.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{
    is_fundamental_discriminant, is_prime, kronecker, squarefree_decompose, two_square_reps,
    vp_int, PadicValuation, Parity,
};
use crate::cohen::{h_coeff, CohenIndex};
use crate::dirichlet::{l_neg, QuadCharacter};
use crate::error::{Error, Result};

/// Both sides of the weight-5 identity at one index, kept separate so tests
/// can compare the disjoint code paths.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityEvaluation {
    pub n: u64,
    pub lhs: BigRational,
    pub rhs_divisor_term: BigRational,
    pub rhs_two_square_term: BigRational,
    pub equal: bool,
}

/// lhs = sum over all integers s with n - s^2 >= 0 of h(4, n - s^2);
/// rhs = (1/300) sum_{r|n} (r^4 + (n/r)^4)(-4/r)
///     + (1/400) sum_{n = x^2 + y^2} (x^4 - 6 x^2 y^2 + y^4).
pub fn identity_eval(n: u64) -> IdentityEvaluation {
    assert!(n >= 1, "identity is stated for n >= 1");
    let i4 = CohenIndex::new(4).expect("4 >= 2");

    let mut lhs = BigRational::zero();
    let mut s = 0u64;
    while s * s <= n {
        let term = h_coeff(i4, n - s * s);
        lhs += if s == 0 { term } else { BigRational::from(BigInt::from(2)) * term };
        s += 1;
    }

    let mut div_sum = BigInt::zero();
    for r in crate::arith::factorize(n).divisors() {
        let chi = kronecker(-4, r as i64);
        if chi == 0 {
            continue;
        }
        let quartics = BigInt::from(r).pow(4) + BigInt::from(n / r).pow(4);
        div_sum += BigInt::from(chi) * quartics;
    }
    let rhs_divisor_term = BigRational::new(div_sum, BigInt::from(300));

    let mut sq_sum = BigInt::zero();
    for (x, y) in two_square_reps(n) {
        let (x, y) = (BigInt::from(x), BigInt::from(y));
        let (x2, y2) = (&x * &x, &y * &y);
        sq_sum += &x2 * &x2 - BigInt::from(6) * &x2 * &y2 + &y2 * &y2;
    }
    let rhs_two_square_term = BigRational::new(sq_sum, BigInt::from(400));

    let equal = lhs == &rhs_divisor_term + &rhs_two_square_term;
    IdentityEvaluation { n, lhs, rhs_divisor_term, rhs_two_square_term, equal }
}

/// A certified decomposition 2·ell·ell' = x^2 + d·y^2 whose d has unit
/// L-value at 2-5.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub d: i64,
    pub x: u64,
    pub y: u64,
    pub l_value: BigRational,
}

fn check_find_d_inputs(ell: u64, ell_prime: u64) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if !is_prime(ell_prime) {
        return Err(Error::NotPrime(ell_prime));
    }
    if ell % 4 != 1 || ell == 5 {
        return Err(Error::InvalidArgument(format!(
            "ell = {ell} must be a prime congruent to 1 mod 4, not 5"
        )));
    }
    if ell_prime % 4 != 3 || ell_prime == 5 {
        return Err(Error::InvalidArgument(format!(
            "ell_prime = {ell_prime} must be a prime congruent to 3 mod 4, not 5"
        )));
    }
    let quartic = 1i128 - (ell_prime as i128).pow(4);
    if vp_int(quartic, 5) != PadicValuation::Finite(1) {
        return Err(Error::InvalidArgument(format!(
            "v_5(1 - {ell_prime}^4) must be 1, got {}",
            vp_int(quartic, 5)
        )));
    }
    Ok(())
}

/// Enumerates odd x with 2·ell·ell' - x^2 > 0; every remainder is 1 mod 4
/// and decomposes as d·y^2 with d squarefree. Skips d = 1 and 5 | d, keeps
/// d whose L(-3, chi_d) is a 5-adic unit, returns the smallest such d
/// (ties by smaller x). A full sweep without a witness gets its own error so
/// callers can tell an exhausted search from a precondition failure.
pub fn find_d(ell: u64, ell_prime: u64) -> Result<Witness> {
    check_find_d_inputs(ell, ell_prime)?;
    let n = 2 * ell * ell_prime;
    let mut best: Option<Witness> = None;
    let mut x = 1u64;
    while x * x < n {
        let rem = n - x * x;
        let (d, y) = squarefree_decompose(rem, Parity::Even)
            .expect("2 ell ell' - x^2 is 1 mod 4 for odd x");
        if d != 1 && d % 5 != 0 && best.as_ref().map_or(true, |b| d < b.d) {
            let l = l_neg(4, QuadCharacter::new(d)?)?.value;
            if crate::arith::vp(&l, 5)?.is_zero() {
                best = Some(Witness { d, x, y, l_value: l });
            }
        }
        x += 2;
    }
    best.ok_or_else(|| {
        Error::NoWitnessFound(format!(
            "no unit-valued discriminant in the decompositions of {n}"
        ))
    })
}

/// Primes ell <= bound with ell = 3 mod 4, v_5(1 - ell) = 1, and
/// kronecker(d_i, ell) = 1 for every listed d_i. Direct sieve.
pub fn sieve_lemma42(d_list: &[i64], bound: u64) -> Result<Vec<u64>> {
    if bound < 3 {
        return Err(Error::InvalidArgument(format!(
            "sieve bound must be >= 3, got {bound}"
        )));
    }
    for &d in d_list {
        if d <= 1 || !is_fundamental_discriminant(d) {
            return Err(Error::NotFundamental(d));
        }
    }
    let mut out = Vec::new();
    for ell in (3..=bound).step_by(4) {
        if !is_prime(ell) || vp_int(1 - ell as i128, 5) != PadicValuation::Finite(1) {
            continue;
        }
        if d_list.iter().all(|&d| kronecker(d, ell as i64) == 1) {
            out.push(ell);
        }
    }
    Ok(out)
}

/// One new 5-rational discriminant guaranteed outside `known`.
#[derive(Clone, Debug, PartialEq)]
pub struct NextNew {
    pub d_new: i64,
    /// the prime = 1 mod 4 handed to find_d
    pub ell: u64,
    /// the sieved prime = 3 mod 4 (quadratic nonresidue position for d_new)
    pub ell_prime: u64,
    pub x: u64,
    pub y: u64,
    pub l_value: BigRational,
}

/// Runs the sieve against the known list, pairs the smallest surviving prime
/// with the smallest admissible ell = 1 mod 4, and extracts d via find_d.
/// The output d has kronecker(d, ell_prime) != 1 while every known d_i has
/// kronecker(d_i, ell_prime) = 1, so d is new.
pub fn next_new_5rational(known: &[i64], sieve_bound: u64, ellprime_bound: u64) -> Result<NextNew> {
    let sieved = sieve_lemma42(known, sieve_bound)?;
    let Some(&ell_prime) = sieved.first() else {
        return Err(Error::SieveExhausted { bound: sieve_bound });
    };
    let ell = (13..=ellprime_bound)
        .step_by(4)
        .find(|&q| is_prime(q))
        .ok_or(Error::SieveExhausted { bound: ellprime_bound })?;
    let w = find_d(ell, ell_prime)?;
    debug_assert!(kronecker(w.d, ell_prime as i64) != 1);
    Ok(NextNew {
        d_new: w.d,
        ell,
        ell_prime,
        x: w.x,
        y: w.y,
        l_value: w.l_value,
    })
}
