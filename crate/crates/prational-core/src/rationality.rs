//! p-rationality verdicts for quadratic fields.
//!
//! Real d, p unramified: the field is p-rational exactly when
//! v_p(L(2-p, chi_d)) = 0. Ramified p (p | d) gets not_applicable: the
//! criterion's hypothesis fails and no verdict is fabricated.
//!
//! Imaginary d: only the sufficient direction is exposed. p coprime to the
//! class number certifies p-rational; p dividing it is inconclusive, not a
//! negative verdict.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::arith::{fundamental_discriminants_up_to, is_fundamental_discriminant, is_prime, vp, PadicValuation};
use crate::dirichlet::{class_number_imag, l_neg, QuadCharacter};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    PRational,
    NotPRational,
    Inconclusive,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::PRational => "p_rational",
            Verdict::NotPRational => "not_p_rational",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotApplicable => "not_applicable",
        };
        f.write_str(s)
    }
}

/// One verdict row. For real d, `l_value` holds L(2-p, chi_d); for imaginary
/// d it carries the class number h(d) instead (same slot, different meaning,
/// reason tag disambiguates).
#[derive(Clone, Debug, PartialEq)]
pub struct RationalityReport {
    pub d: i64,
    pub p: u64,
    pub l_value: Option<BigRational>,
    pub valuation: Option<i64>,
    pub verdict: Verdict,
    pub reason: &'static str,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// Exact criterion for real quadratic fields, d > 1 fundamental, p odd.
pub fn is_p_rational_real(d: i64, p: u64) -> Result<RationalityReport> {
    check_odd_prime(p)?;
    if d <= 1 || !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    if d % p as i64 == 0 {
        return Ok(RationalityReport {
            d,
            p,
            l_value: None,
            valuation: None,
            verdict: Verdict::NotApplicable,
            reason: "p_divides_d",
        });
    }
    let chi = QuadCharacter::new(d)?;
    let l = l_neg((p - 1) as u32, chi)?.value;
    let (valuation, verdict) = match vp(&l, p)? {
        PadicValuation::Finite(v) => {
            debug_assert!(v >= 0, "real-quadratic L-value with negative valuation");
            let verdict = if v == 0 { Verdict::PRational } else { Verdict::NotPRational };
            (Some(v), verdict)
        }
        PadicValuation::Infinite => (None, Verdict::NotPRational),
    };
    Ok(RationalityReport {
        d,
        p,
        l_value: Some(l),
        valuation,
        verdict,
        reason: "ok",
    })
}

/// Sufficient condition for imaginary quadratic fields, p >= 5:
/// p coprime to h(d) certifies p-rational.
pub fn is_p_rational_imag_sufficient(d: i64, p: u64) -> Result<RationalityReport> {
    if !is_prime(p) || p < 5 {
        return Err(Error::InvalidArgument(format!(
            "imaginary criterion requires prime p >= 5, got {p}"
        )));
    }
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let h = class_number_imag(d)?;
    let mut v = 0i64;
    let mut rest = h;
    while rest % p == 0 {
        rest /= p;
        v += 1;
    }
    let (verdict, reason) = if v == 0 {
        (Verdict::PRational, "class_number_prime_to_p")
    } else {
        (Verdict::Inconclusive, "p_divides_class_number")
    };
    Ok(RationalityReport {
        d,
        p,
        l_value: Some(BigRational::from(BigInt::from(h))),
        valuation: Some(v),
        verdict,
        reason,
    })
}

/// One report per fundamental discriminant 1 < d <= d_max, in d order.
pub fn scan_real(p: u64, d_max: i64) -> Result<Vec<RationalityReport>> {
    check_odd_prime(p)?;
    if d_max < 5 {
        return Err(Error::InvalidArgument(format!(
            "scan_real requires d_max >= 5, got {d_max}"
        )));
    }
    fundamental_discriminants_up_to(d_max)
        .into_par_iter()
        .map(|d| is_p_rational_real(d, p))
        .collect()
}
