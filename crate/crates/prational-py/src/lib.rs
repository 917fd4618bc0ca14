//! Python module `prational`: thin wrappers over prational-core. Exact
//! rationals cross the boundary as `fractions.Fraction`, reports as dicts,
//! and every library error surfaces as ValueError carrying the stable tag.

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};
use pyo3::Bound;

use prational_core::arith;
use prational_core::cohen as cohen_mod;
use prational_core::dirichlet::{self, QuadCharacter};
use prational_core::rationality::{self, RationalityReport};
use prational_core::search5;
use prational_core::serre::{self, HypReport, ScanConfig, SerreScanReport};
use prational_core::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.numer().clone(), r.denom().clone()))
}

fn verdict_dict<'py>(py: Python<'py>, rep: &RationalityReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("d", rep.d)?;
    d.set_item("p", rep.p)?;
    match &rep.l_value {
        Some(v) => d.set_item("l_value", fraction(py, v)?)?,
        None => d.set_item("l_value", py.None())?,
    }
    d.set_item("valuation", rep.valuation)?;
    d.set_item("verdict", rep.verdict.to_string())?;
    d.set_item("reason", rep.reason)?;
    Ok(d)
}

fn hyp_dict<'py>(py: Python<'py>, h: &HypReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("p", h.p)?;
    d.set_item("t", h.t)?;
    d.set_item("ell", h.ell)?;
    d.set_item("cornacchia", h.cornacchia)?;
    d.set_item("b_prime", h.b_prime)?;
    d.set_item("wieferich_ok", h.wieferich_ok)?;
    d.set_item("eps_b_mod_p2", h.eps_sigma_b_mod_p2)?;
    d.set_item("hp_holds", h.hp_holds)?;
    Ok(d)
}

fn scan_dict<'py>(py: Python<'py>, r: &SerreScanReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("ell", r.ell)?;
    d.set_item("congruence_ok", r.congruence_ok)?;
    d.set_item("cornacchia", r.cornacchia)?;
    d.set_item("b_prime", r.b_prime)?;
    d.set_item("wieferich_ok", r.wieferich_ok)?;
    d.set_item("eps_b_mod_p2", r.eps_sigma_b_mod_p2)?;
    d.set_item("hp_holds", r.hp_holds)?;
    d.set_item("a_mod_p2", r.a_mod_p2)?;
    d.set_item("b_mod_p2", r.b_mod_p2)?;
    d.set_item("ab_congruence_ok", r.ab_congruence_ok)?;
    d.set_item("extracted_d", r.extracted_d)?;
    Ok(d)
}

/// kronecker(a, n): the Kronecker symbol (a/n).
#[pyfunction]
fn kronecker(a: i64, n: i64) -> i32 {
    arith::kronecker(a, n)
}

/// lvalue(i, d): L(1 - i, chi_d) as a Fraction; d = 1 gives zeta(1 - i).
#[pyfunction]
fn lvalue(py: Python<'_>, i: u32, d: i64) -> PyResult<Bound<'_, PyAny>> {
    let chi = QuadCharacter::new(d).map_err(err)?;
    let v = dirichlet::l_neg(i, chi).map_err(err)?;
    fraction(py, &v.value)
}

/// cohen(i, n): the n-th coefficient of the weight i + 1/2 series.
#[pyfunction]
fn cohen(py: Python<'_>, i: u32, n: u64) -> PyResult<Bound<'_, PyAny>> {
    let idx = cohen_mod::CohenIndex::new(i).map_err(err)?;
    fraction(py, &cohen_mod::h_coeff(idx, n))
}

/// cohen_series(i, prec): coefficients 0..=prec as Fractions.
#[pyfunction]
fn cohen_series(py: Python<'_>, i: u32, prec: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    let idx = cohen_mod::CohenIndex::new(i).map_err(err)?;
    cohen_mod::h_series(idx, prec)
        .coeffs()
        .iter()
        .map(|c| fraction(py, c))
        .collect()
}

/// h1_residues(p, e, prec): the streaming series p*h(p-1, n) mod p^e.
#[pyfunction]
fn h1_residues(p: u64, e: u32, prec: usize) -> PyResult<Vec<u64>> {
    Ok(cohen_mod::h1_residues(p, e, prec).map_err(err)?.coeffs)
}

/// eps_sigma(d, i, m): the multiplicative square-part factor.
#[pyfunction]
fn eps_sigma(py: Python<'_>, d: i64, i: u32, m: u64) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &dirichlet::eps_sigma(d, i, m))
}

/// class_number_imag(d): h(d) for fundamental d < 0.
#[pyfunction]
fn class_number_imag(d: i64) -> PyResult<u64> {
    dirichlet::class_number_imag(d).map_err(err)
}

/// is_p_rational(d, p): verdict dict for the real quadratic field of
/// discriminant d.
#[pyfunction]
fn is_p_rational(py: Python<'_>, d: i64, p: u64) -> PyResult<Bound<'_, PyDict>> {
    verdict_dict(py, &rationality::is_p_rational_real(d, p).map_err(err)?)
}

/// scan_real(p, dmax): verdict dicts for every fundamental 1 < d <= dmax.
#[pyfunction]
fn scan_real(py: Python<'_>, p: u64, dmax: i64) -> PyResult<Vec<Bound<'_, PyDict>>> {
    rationality::scan_real(p, dmax)
        .map_err(err)?
        .iter()
        .map(|rep| verdict_dict(py, rep))
        .collect()
}

/// identity_eval(n): both sides of the weight-5 identity at n.
#[pyfunction]
fn identity_eval(py: Python<'_>, n: u64) -> PyResult<Bound<'_, PyDict>> {
    if n == 0 {
        return Err(PyValueError::new_err("invalid_argument: identity needs n >= 1"));
    }
    let ev = search5::identity_eval(n);
    let d = PyDict::new(py);
    d.set_item("n", ev.n)?;
    d.set_item("lhs", fraction(py, &ev.lhs)?)?;
    d.set_item("rhs_divisor", fraction(py, &ev.rhs_divisor_term)?)?;
    d.set_item("rhs_two_square", fraction(py, &ev.rhs_two_square_term)?)?;
    d.set_item("equal", ev.equal)?;
    Ok(d)
}

/// find_5rational(l, lprime): witness 2 l l' = x^2 + d y^2 with 5-rational d.
#[pyfunction]
fn find_5rational(py: Python<'_>, l: u64, lprime: u64) -> PyResult<Bound<'_, PyDict>> {
    let w = search5::find_d(l, lprime).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("d", w.d)?;
    d.set_item("x", w.x)?;
    d.set_item("y", w.y)?;
    d.set_item("l_value", fraction(py, &w.l_value)?)?;
    Ok(d)
}

/// sieve(d_list, bound): primes ell' = 3 mod 4 up to bound splitting every
/// listed discriminant.
#[pyfunction]
fn sieve(d_list: Vec<i64>, bound: u64) -> PyResult<Vec<u64>> {
    search5::sieve_lemma42(&d_list, bound).map_err(err)
}

/// next_new(known, sieve_bound, lp_bound): one 5-rational discriminant
/// outside the known list.
#[pyfunction]
fn next_new(
    py: Python<'_>,
    known: Vec<i64>,
    sieve_bound: u64,
    lp_bound: u64,
) -> PyResult<Bound<'_, PyDict>> {
    let nn = search5::next_new_5rational(&known, sieve_bound, lp_bound).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("d_new", nn.d_new)?;
    d.set_item("ell", nn.ell)?;
    d.set_item("ell_prime", nn.ell_prime)?;
    d.set_item("x", nn.x)?;
    d.set_item("y", nn.y)?;
    d.set_item("l_value", fraction(py, &nn.l_value)?)?;
    Ok(d)
}

/// hyp_check(p, t, ell): two-square hypothesis report for one prime.
#[pyfunction]
fn hyp_check(py: Python<'_>, p: u64, t: u64, ell: u64) -> PyResult<Bound<'_, PyDict>> {
    hyp_dict(py, &serre::hyp_check(p, t, ell).map_err(err)?)
}

/// serre_scan(p, t, primes, prec, ncheck, lmin, lmax): per-candidate
/// congruence reports over the inclusive range.
#[pyfunction]
fn serre_scan(
    py: Python<'_>,
    p: u64,
    t: u64,
    primes: Vec<u64>,
    prec: usize,
    ncheck: usize,
    lmin: u64,
    lmax: u64,
) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let cfg = ScanConfig { p, t, l: primes, prec, n_check: ncheck, ell_range: (lmin, lmax) };
    serre::scan_serre(&cfg)
        .map_err(err)?
        .iter()
        .map(|r| scan_dict(py, r))
        .collect()
}

#[pymodule]
fn prational(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(lvalue, m)?)?;
    m.add_function(wrap_pyfunction!(cohen, m)?)?;
    m.add_function(wrap_pyfunction!(cohen_series, m)?)?;
    m.add_function(wrap_pyfunction!(h1_residues, m)?)?;
    m.add_function(wrap_pyfunction!(eps_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(class_number_imag, m)?)?;
    m.add_function(wrap_pyfunction!(is_p_rational, m)?)?;
    m.add_function(wrap_pyfunction!(scan_real, m)?)?;
    m.add_function(wrap_pyfunction!(identity_eval, m)?)?;
    m.add_function(wrap_pyfunction!(find_5rational, m)?)?;
    m.add_function(wrap_pyfunction!(sieve, m)?)?;
    m.add_function(wrap_pyfunction!(next_new, m)?)?;
    m.add_function(wrap_pyfunction!(hyp_check, m)?)?;
    m.add_function(wrap_pyfunction!(serre_scan, m)?)?;
    Ok(())
}
