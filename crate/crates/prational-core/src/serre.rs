//! Serre-prime scanning: build f = G·theta_t, check the truncated Hecke
//! congruence f|T(ell) = 2f mod p^2 at candidate primes, decompose c(ell)
//! into the non-square and square representation sums A + B, test the
//! non-Wieferich hypothesis through the Cornacchia decomposition, and
//! extract a certified p-rational discriminant when the valuation pattern
//! allows it.
//!
//! The scan runs on residues mod p^4: two guard digits above the p^2
//! congruence target. The exact rational path stays authoritative and the
//! two must agree wherever both are computed.

use rayon::prelude::*;

use crate::arith::{
    cornacchia, is_fundamental_discriminant, is_prime, is_wieferich, kronecker, perfect_sqrt,
    squarefree_decompose, Parity,
};
use crate::cohen::{check_restriction_primes, g_residues, g_series};
use crate::dirichlet::QuadCharacter;
use crate::error::{Error, Result};
use crate::qseries::{hecke_residue, qs_mul, theta_t, QExpansion, ResidueSeries};
use crate::rationality::{is_p_rational_real, Verdict};

/// Residue digits carried by the scan series: p^2 target plus two guards,
/// below which h1's cleared denominators stay invertible.
pub const SCAN_GUARD_E: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub p: u64,
    /// fundamental discriminant > 1; the theta shift
    pub t: u64,
    /// distinct odd primes != p cutting the index set down to residues
    pub l: Vec<u64>,
    /// series precision N
    pub prec: usize,
    /// congruence indices checked: 1 <= n <= n_check
    pub n_check: usize,
    /// inclusive candidate range (lo, hi)
    pub ell_range: (u64, u64),
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) || self.p < 5 {
            return Err(Error::InvalidArgument(format!(
                "scan requires prime p >= 5, got {}",
                self.p
            )));
        }
        if self.t <= 1 || !is_fundamental_discriminant(self.t as i64) {
            return Err(Error::NotFundamental(self.t as i64));
        }
        check_restriction_primes(self.p, &self.l)?;
        if self.n_check == 0 {
            return Err(Error::InvalidArgument("n_check must be >= 1".into()));
        }
        if self.ell_range.0 > self.ell_range.1 {
            return Err(Error::InvalidArgument(format!(
                "empty candidate range ({}, {})",
                self.ell_range.0, self.ell_range.1
            )));
        }
        self.checked_modulus().ok_or_else(|| {
            Error::InvalidArgument("candidate modulus 4 t p^2 prod l^4 overflows".into())
        })?;
        Ok(())
    }

    fn checked_modulus(&self) -> Option<u64> {
        let mut m = 4u64.checked_mul(self.t)?.checked_mul(self.p.checked_pow(2)?)?;
        for &ell in &self.l {
            m = m.checked_mul(ell.checked_pow(4)?)?;
        }
        Some(m)
    }

    /// 4 t p^2 prod ell^4: candidates are primes = 1 mod this.
    pub fn modulus(&self) -> u64 {
        self.checked_modulus().expect("validated config")
    }

    /// Primes in ell_range congruent to 1 mod the modulus, ascending.
    pub fn candidate_primes(&self) -> Vec<u64> {
        let m = self.modulus();
        let (lo, hi) = self.ell_range;
        let mut k = if lo <= 1 { 1 } else { (lo - 2) / m + 1 };
        let mut out = Vec::new();
        loop {
            let Some(ell) = k.checked_mul(m).and_then(|v| v.checked_add(1)) else {
                break;
            };
            if ell > hi {
                break;
            }
            if ell >= lo && is_prime(ell) {
                out.push(ell);
            }
            k += 1;
        }
        out
    }

    /// Smallest N supporting the congruence window over the whole range.
    pub fn required_prec(&self) -> usize {
        (self.ell_range.1 as usize).saturating_mul(self.n_check)
    }
}

/// Shared residue data for one scan: the restricted series g and the
/// convolved f = g * theta_t, both mod p^SCAN_GUARD_E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanSeries {
    pub g: ResidueSeries,
    pub f: ResidueSeries,
}

/// Hypothesis report for one prime: the Cornacchia decomposition
/// ell = t a^2 + b^2 and what it says about (H_p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypReport {
    pub p: u64,
    pub t: u64,
    pub ell: u64,
    pub cornacchia: Option<(u64, u64)>,
    pub b_prime: Option<bool>,
    pub wieferich_ok: Option<bool>,
    pub eps_sigma_b_mod_p2: Option<u64>,
    pub hp_holds: bool,
}

/// Full per-candidate scan row.
#[derive(Clone, Debug, PartialEq)]
pub struct SerreScanReport {
    pub ell: u64,
    pub congruence_ok: bool,
    pub cornacchia: Option<(u64, u64)>,
    pub b_prime: Option<bool>,
    pub wieferich_ok: Option<bool>,
    pub eps_sigma_b_mod_p2: Option<u64>,
    pub hp_holds: bool,
    pub a_mod_p2: u64,
    pub b_mod_p2: u64,
    pub ab_congruence_ok: bool,
    pub extracted_d: Option<(i64, u64, u64)>,
}

/// Exact rational f = G·theta_t. Weight metadata p (stored doubled), level
/// and character from the factors.
pub fn build_f(cfg: &ScanConfig) -> Result<QExpansion> {
    cfg.validate()?;
    let g = g_series(cfg.p, &cfg.l, cfg.prec)?;
    let th = theta_t(cfg.t, cfg.prec);
    Ok(qs_mul(&g, &th))
}

/// f = g * theta_t on residues: scatter each theta support point tx^2 with
/// weight alpha(x) across g. alpha(0) = 1, alpha(x) = 2 for x >= 1.
pub fn convolve_theta(g: &ResidueSeries, t: u64) -> ResidueSeries {
    let pe = g.modulus();
    let prec = g.prec();
    let mut coeffs = vec![0u64; prec + 1];
    let mut x = 0u64;
    while let Some(shift) = t.checked_mul(x * x).filter(|&s| s <= prec as u64) {
        let w = if x == 0 { 1 } else { 2 };
        for (j, &v) in g.coeffs.iter().enumerate().take(prec + 1 - shift as usize) {
            if v != 0 {
                let idx = j + shift as usize;
                coeffs[idx] = (coeffs[idx] + w * v) % pe;
            }
        }
        x += 1;
    }
    ResidueSeries { coeffs, p: g.p, e: g.e }
}

/// The residue data for a scan: the expensive, cacheable part.
pub fn scan_series(cfg: &ScanConfig) -> Result<ScanSeries> {
    cfg.validate()?;
    let g = g_residues(cfg.p, &cfg.l, SCAN_GUARD_E, cfg.prec)?;
    let f = convolve_theta(&g, cfg.t);
    Ok(ScanSeries { g, f })
}

fn hyp_from_parts(p: u64, t: u64, ell: u64, rep: Option<(u64, u64)>) -> Result<HypReport> {
    let p2 = p * p;
    let mut report = HypReport {
        p,
        t,
        ell,
        cornacchia: rep,
        b_prime: None,
        wieferich_ok: None,
        eps_sigma_b_mod_p2: None,
        hp_holds: false,
    };
    if let Some((_, b)) = rep {
        let eps = crate::dirichlet::eps_sigma_mod(1, (p - 1) as u32, b, p2);
        report.eps_sigma_b_mod_p2 = Some(eps);
        report.hp_holds = eps != 1;
        let b_prime = is_prime(b);
        report.b_prime = Some(b_prime);
        if b_prime {
            report.wieferich_ok = Some(if b % p == 0 {
                false
            } else {
                !is_wieferich(p, b)?
            });
        }
    }
    Ok(report)
}

/// (H_p)/(H'_p) status of one prime via its Cornacchia decomposition.
/// A missing decomposition is a report with hp_holds = false, not an error.
pub fn hyp_check(p: u64, t: u64, ell: u64) -> Result<HypReport> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    if t <= 1 || !is_fundamental_discriminant(t as i64) {
        return Err(Error::NotFundamental(t as i64));
    }
    let rep = cornacchia(t, ell)?;
    hyp_from_parts(p, t, ell, rep)
}

/// Representation sums at ell: A over non-square y, B over square y, both
/// mod the series modulus. The sum A + B must match the convolved
/// coefficient f[ell]; callers assert that equality.
pub fn ab_components(cfg: &ScanConfig, ell: u64, series: &ScanSeries) -> Result<(u64, u64)> {
    if series.g.prec() < ell as usize {
        return Err(Error::PrecisionTooSmall { required: ell as usize, have: series.g.prec() });
    }
    let pe = series.g.modulus();
    let mut a = 0u64;
    let mut b = 0u64;
    let mut x = 0u64;
    while cfg.t * x * x < ell {
        let y = ell - cfg.t * x * x;
        let w = if x == 0 { 1 } else { 2 };
        let v = w * series.g.coeffs[y as usize] % pe;
        if perfect_sqrt(y).is_some() {
            b = (b + v) % pe;
        } else {
            a = (a + v) % pe;
        }
        x += 1;
    }
    Ok((a, b))
}

/// (A mod p^2, B mod p^2, ab_congruence_ok). The flag re-derives the n = 1
/// congruence: when the series path says c(ell) = 2c(1) mod p^2, the
/// enumeration path must say A = 2c(1) - B.
pub fn ab_report_with(cfg: &ScanConfig, ell: u64, series: &ScanSeries) -> Result<(u64, u64, bool)> {
    let (a, b) = ab_components(cfg, ell, series)?;
    let p2 = cfg.p * cfg.p;
    let (a2, b2) = (a % p2, b % p2);
    let c1 = series.f.coeffs[1] % p2;
    let cl = series.f.coeffs[ell as usize] % p2;
    let n1_ok = cl == 2 * c1 % p2;
    let ab_ok = !n1_ok || a2 == (2 * c1 % p2 + p2 - b2) % p2;
    Ok((a2, b2, ab_ok))
}

/// Standalone ab_report: builds the residue series for this one prime.
/// Prefer ab_report_with when scanning many primes.
pub fn ab_report(cfg: &ScanConfig, ell: u64) -> Result<(u64, u64, bool)> {
    let series = scan_series(cfg)?;
    ab_report_with(cfg, ell, &series)
}

/// Hunts the representation ell = t x^2 + y for a term with
/// v_p(alpha(x) h1(p-1, y)) = 1 and returns its decomposition y = d y1^2.
/// The residue test r = 0 mod p, r != 0 mod p^2 is exact because every
/// coefficient has non-negative valuation and the series carries p^4.
/// Hits are re-certified through the exact L-value path before being
/// returned.
pub fn extract_d_with(
    cfg: &ScanConfig,
    ell: u64,
    series: &ScanSeries,
) -> Result<Option<(i64, u64, u64)>> {
    if series.g.prec() < ell as usize {
        return Err(Error::PrecisionTooSmall { required: ell as usize, have: series.g.prec() });
    }
    let p = cfg.p;
    let p2 = p * p;
    let mut x = 0u64;
    while cfg.t * x * x < ell {
        let y = ell - cfg.t * x * x;
        x += 1;
        // square y belongs to the two-square component, and x = 0 gives
        // y = ell itself whose kernel is not below ell; neither qualifies
        if perfect_sqrt(y).is_some() {
            continue;
        }
        let r = series.g.coeffs[y as usize];
        // alpha(x) is 1 or 2, coprime to p: it never moves the valuation
        if r % p != 0 || r % p2 == 0 {
            continue;
        }
        let (d, y1) = squarefree_decompose(y, Parity::Even)
            .expect("nonzero h1 coefficient index is 0 or 1 mod 4");
        debug_assert!(d > 1, "square index would be a p-adic unit");
        debug_assert!(d % p as i64 != 0);
        if (d as u64) >= ell {
            continue;
        }
        if !cfg.l.iter().all(|&lk| kronecker(d, lk as i64) == 1) {
            continue;
        }
        let report = is_p_rational_real(d, p)?;
        debug_assert_eq!(
            report.verdict,
            Verdict::PRational,
            "residue valuation 1 must pin a unit L-value at d = {d}"
        );
        if report.verdict == Verdict::PRational {
            return Ok(Some((d, x - 1, y1)));
        }
    }
    Ok(None)
}

/// Standalone extract_d; builds the series itself.
pub fn extract_d(cfg: &ScanConfig, ell: u64) -> Result<Option<(i64, u64, u64)>> {
    let series = scan_series(cfg)?;
    extract_d_with(cfg, ell, &series)
}

/// Scan every candidate prime against a prepared series.
pub fn scan_with_series(cfg: &ScanConfig, series: &ScanSeries) -> Result<Vec<SerreScanReport>> {
    cfg.validate()?;
    if series.g.p != cfg.p || series.g.e < 2 || series.f.p != cfg.p {
        return Err(Error::InvalidArgument(
            "scan series modulus does not match the config".into(),
        ));
    }
    let required = cfg.required_prec();
    if series.f.prec() < required || series.g.prec() < required {
        return Err(Error::PrecisionTooSmall { required, have: series.f.prec().min(series.g.prec()) });
    }
    let psi = QuadCharacter::new(cfg.t as i64)?;
    let f2 = series.f.reduce_to(2);
    let p2 = cfg.p * cfg.p;
    let candidates = cfg.candidate_primes();
    candidates
        .par_iter()
        .map(|&ell| {
            assert_eq!(psi.eval(ell as i64), 1, "candidate must satisfy psi(ell) = 1");
            let tf = hecke_residue(&f2, ell, cfg.p as u32, psi)?;
            let congruence_ok = (1..=cfg.n_check)
                .all(|n| tf.coeffs[n] == 2 * f2.coeffs[n] % p2);
            let hyp = hyp_check(cfg.p, cfg.t, ell)?;
            let (a_mod_p2, b_mod_p2, ab_congruence_ok) = ab_report_with(cfg, ell, series)?;
            let extracted_d = extract_d_with(cfg, ell, series)?;
            Ok(SerreScanReport {
                ell,
                congruence_ok,
                cornacchia: hyp.cornacchia,
                b_prime: hyp.b_prime,
                wieferich_ok: hyp.wieferich_ok,
                eps_sigma_b_mod_p2: hyp.eps_sigma_b_mod_p2,
                hp_holds: hyp.hp_holds,
                a_mod_p2,
                b_mod_p2,
                ab_congruence_ok,
                extracted_d,
            })
        })
        .collect()
}

/// Build the series and scan: the one-call entry point.
pub fn scan_serre(cfg: &ScanConfig) -> Result<Vec<SerreScanReport>> {
    let series = scan_series(cfg)?;
    scan_with_series(cfg, &series)
}
