//! Cross-cutting properties checked through the public API only, so every
//! assertion here is an independent route to the same numbers the unit
//! tests pin pointwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use prational_core::arith::{
    cornacchia, factorize, fundamental_discriminants_up_to, is_fundamental_discriminant,
    is_prime, kronecker, moebius, perfect_sqrt, sigma_pow, squarefree_decompose,
    two_square_reps, vp, vp_int, PadicValuation, Parity,
};
use prational_core::cohen::{g_residues, g_series, h1_residues, h1_series};
use prational_core::dirichlet::{
    bernoulli, class_number_imag, eps_sigma, l_neg, l_neg_pm1_mod, QuadCharacter,
};
use prational_core::qexp_io::{read_qexp, read_residue, write_qexp, write_residue};
use prational_core::qseries::{
    hecke, hecke_residue, op_b, op_restrict, op_twist, qs_mul, reduce_mod, QExpansion,
    ResidueSeries,
};
use prational_core::rationality::{is_p_rational_real, scan_real, Verdict};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ints(vals: &[i64]) -> QExpansion {
    let coeffs = vals.iter().map(|&v| BigRational::from(BigInt::from(v))).collect();
    QExpansion::new(coeffs, 0, 1, QuadCharacter::trivial())
}

/// Extended-Euclid inverse, deliberately not the library routine.
fn inv_mod(a: u64, m: u64) -> Option<u64> {
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

/// num/den mod pe through the test-local inverse.
fn residue_of(q: &BigRational, pe: u64) -> Option<u64> {
    let m = BigInt::from(pe);
    let num = q.numer().mod_floor(&m);
    let den = q.denom().mod_floor(&m);
    let den: u64 = den.try_into().ok()?;
    let num: u64 = num.try_into().ok()?;
    let inv = inv_mod(den, pe)?;
    Some((num as u128 * inv as u128 % pe as u128) as u64)
}

// ---- base arithmetic ----

#[test]
fn kronecker_is_completely_multiplicative_below() {
    for d in [-8, -7, -4, -3, 1, 5, 8, 12, 13, 21, 61] {
        for n1 in 1i64..=60 {
            for n2 in 1i64..=60 {
                assert_eq!(
                    kronecker(d, n1 * n2),
                    kronecker(d, n1) * kronecker(d, n2),
                    "({d}/{n1}*{n2})"
                );
            }
        }
    }
}

#[test]
fn kronecker_period_and_vanishing() {
    for d in [-8i64, -7, -4, -3, 5, 8, 12, 13, 24, 61] {
        let f = d.unsigned_abs() as i64;
        for n in 1..=3 * f {
            assert_eq!(kronecker(d, n), kronecker(d, n + f), "period ({d}/{n})");
            assert_eq!(kronecker(d, n) == 0, n.gcd(&f) > 1, "vanishing ({d}/{n})");
        }
    }
}

#[test]
fn bernoulli_von_staudt_clausen() {
    // denominator of B_2k is the product of primes p with p-1 | 2k
    for n in (2u32..=60).step_by(2) {
        let mut denom = BigInt::one();
        for p in 2u64..=(n as u64 + 1) {
            if is_prime(p) && n as u64 % (p - 1) == 0 {
                denom *= BigInt::from(p);
            }
        }
        assert_eq!(bernoulli(n).denom(), &denom, "n = {n}");
    }
    for n in (3u32..=61).step_by(2) {
        assert!(bernoulli(n).is_zero(), "odd B_{n}");
    }
}

#[test]
fn moebius_and_sigma_are_multiplicative() {
    for m in 1u64..=80 {
        for n in 1u64..=80 {
            if m.gcd(&n) == 1 {
                assert_eq!(moebius(m * n), moebius(m) * moebius(n));
                for s in [1u32, 3, 7] {
                    assert_eq!(sigma_pow(s, m * n), sigma_pow(s, m) * sigma_pow(s, n));
                }
            }
        }
    }
    // mu sums to the unit indicator over divisors
    for n in 1u64..=2000 {
        let total: i32 = factorize(n).divisors().iter().map(|&d| moebius(d)).sum();
        assert_eq!(total, i32::from(n == 1), "n = {n}");
    }
}

#[test]
fn squarefree_decompose_reconstructs_input() {
    for n in 1u64..=4000 {
        match squarefree_decompose(n, Parity::Even) {
            Some((d, m)) => {
                assert!(d == 1 || is_fundamental_discriminant(d), "n = {n} d = {d}");
                assert!(d > 0);
                assert_eq!(d as u64 * m * m, n, "n = {n}");
            }
            None => assert!(n % 4 == 2 || n % 4 == 3, "n = {n}"),
        }
        match squarefree_decompose(n, Parity::Odd) {
            Some((d, m)) => {
                assert!(is_fundamental_discriminant(d), "n = {n} d = {d}");
                assert!(d < 0);
                assert_eq!(d.unsigned_abs() * m * m, n, "n = {n}");
            }
            None => assert!(n % 4 == 1 || n % 4 == 2, "n = {n}"),
        }
    }
}

#[test]
fn fundamental_discriminants_match_first_principles() {
    let squarefree = |n: u64| factorize(n).square_split().1 == 1;
    for d in -2000i64..=2000 {
        let expected = if d == 0 {
            false
        } else if d.rem_euclid(4) == 1 {
            d != 1 && squarefree(d.unsigned_abs())
        } else if d.rem_euclid(4) == 0 {
            let r = (d / 4).rem_euclid(4);
            (r == 2 || r == 3) && squarefree((d / 4).unsigned_abs())
        } else {
            false
        };
        assert_eq!(is_fundamental_discriminant(d), expected, "d = {d}");
    }
    let listed = fundamental_discriminants_up_to(500);
    let filtered: Vec<i64> = (2..=500).filter(|&d| is_fundamental_discriminant(d)).collect();
    assert_eq!(listed, filtered);
}

/// Reduced positive definite forms (a, b, c) of discriminant d < 0:
/// -a < b <= a <= c, and b >= 0 when a = c or b = a... the classical
/// normalization counts each class once.
fn reduced_form_count(d: i64) -> u64 {
    assert!(d < 0);
    let mut count = 0u64;
    let bound = ((-d) as f64 / 3.0).sqrt() as i64 + 2;
    for a in 1..=bound {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && a == c {
                continue; // counted at |b|
            }
            count += 1;
        }
    }
    count
}

#[test]
fn class_number_matches_reduced_form_count() {
    for d in (-400..=-3).filter(|&d| is_fundamental_discriminant(d)) {
        assert_eq!(class_number_imag(d).unwrap(), reduced_form_count(d), "d = {d}");
    }
}

#[test]
fn two_square_reps_exhaust_solutions() {
    for n in 1u64..=600 {
        let reps = two_square_reps(n);
        let mut brute = Vec::new();
        let s = perfect_sqrt(n).map_or_else(|| (n as f64).sqrt() as i64 + 1, |r| r as i64);
        for x in -s..=s {
            for y in -s..=s {
                if (x * x + y * y) as u64 == n {
                    brute.push((x, y));
                }
            }
        }
        let mut got = reps.clone();
        got.sort_unstable();
        brute.sort_unstable();
        assert_eq!(got, brute, "n = {n}");
        for (x, y) in reps {
            assert_eq!((x * x + y * y) as u64, n);
        }
    }
}

#[test]
fn cornacchia_agrees_with_search() {
    for t in [1u64, 2, 3, 5, 6, 8, 13] {
        let mut ell = 3u64;
        while ell < 3000 {
            if is_prime(ell) && t % ell != 0 {
                let got = cornacchia(t, ell).unwrap();
                let mut brute = None;
                let mut a = 1u64;
                while t * a * a < ell && brute.is_none() {
                    if let Some(b) = perfect_sqrt(ell - t * a * a) {
                        if b > 0 {
                            brute = Some(());
                        }
                    }
                    a += 1;
                }
                assert_eq!(got.is_some(), brute.is_some(), "t = {t} ell = {ell}");
                if let Some((a, b)) = got {
                    assert_eq!(t * a * a + b * b, ell, "t = {t} ell = {ell}");
                    assert!(a >= 1 && b >= 1);
                }
            }
            ell += 2;
        }
    }
}

#[test]
fn vp_is_additive_on_products() {
    for p in [2u64, 3, 5, 7] {
        for a in [-90i64, -8, 1, 6, 25, 49, 140] {
            for b in [-75i64, -2, 3, 10, 98] {
                let va = vp_int(a as i128, p);
                let vb = vp_int(b as i128, p);
                let vab = vp_int((a * b) as i128, p);
                assert_eq!(
                    vab.finite().unwrap(),
                    va.finite().unwrap() + vb.finite().unwrap(),
                    "p = {p} a = {a} b = {b}"
                );
                let q = rat(a, 1) / rat(b, 1);
                let vq = vp(&q, p).unwrap();
                assert_eq!(
                    vq.finite().unwrap(),
                    va.finite().unwrap() - vb.finite().unwrap()
                );
            }
        }
        assert_eq!(vp_int(0, p), PadicValuation::Infinite);
    }
}

// ---- eps convolution ----

#[test]
fn eps_sigma_is_multiplicative() {
    for d in [1i64, 5, 8, -4, 13] {
        for i in [2u32, 3, 4, 6] {
            for m1 in 1u64..=24 {
                for m2 in 1u64..=24 {
                    if m1.gcd(&m2) != 1 {
                        continue;
                    }
                    assert_eq!(
                        eps_sigma(d, i, m1 * m2),
                        eps_sigma(d, i, m1) * eps_sigma(d, i, m2),
                        "d = {d} i = {i} m = {m1}*{m2}"
                    );
                }
            }
        }
    }
}

#[test]
fn eps_sigma_prime_power_closed_form() {
    // on q^k the convolution collapses to sigma(q^k) - chi(q) q^(i-1) sigma(q^(k-1))
    for d in [1i64, 5, 8, -4, 12] {
        for i in [2u32, 4, 6] {
            for q in [2u64, 3, 5, 7, 11] {
                for k in 1u32..=4 {
                    let chi = BigInt::from(kronecker(d, q as i64));
                    let want = sigma_pow(2 * i - 1, q.pow(k))
                        - chi * BigInt::from(q).pow(i - 1) * sigma_pow(2 * i - 1, q.pow(k - 1));
                    assert_eq!(
                        eps_sigma(d, i, q.pow(k)),
                        BigRational::from(want),
                        "d = {d} i = {i} q = {q} k = {k}"
                    );
                }
            }
        }
    }
}

#[test]
fn eps_sigma_prime_argument_congruence() {
    // for prime b: eps*sigma_(2p-3)(b) = 1 + b^(p-2)(b^(p-1) - 1), so mod p^2
    // it detects Wieferich pairs
    for p in [5u64, 7] {
        let p2 = p * p;
        for b in (2u64..=500).filter(|&b| is_prime(b) && b != p) {
            let exact = eps_sigma(1, (p - 1) as u32, b);
            assert!(exact.is_integer());
            let got = exact.numer().mod_floor(&BigInt::from(p2));
            let bp = BigInt::from(b);
            let term = bp.modpow(&BigInt::from(p - 2), &BigInt::from(p2))
                * (bp.modpow(&BigInt::from(p - 1), &BigInt::from(p2)) - BigInt::one());
            let want = (BigInt::one() + term).mod_floor(&BigInt::from(p2));
            assert_eq!(got, want, "p = {p} b = {b}");
        }
    }
}

// ---- modular L kernel vs exact ----

#[test]
fn modular_l_route_matches_exact_reduction() {
    for (p, e) in [(5u64, 1u32), (5, 3), (7, 2), (13, 2)] {
        let pe = p.pow(e);
        for d in fundamental_discriminants_up_to(150) {
            if d % p as i64 == 0 {
                continue;
            }
            let chi = QuadCharacter::new(d).unwrap();
            let exact = l_neg((p - 1) as u32, chi).unwrap().value;
            let want = residue_of(&exact, pe).expect("L(2-p) is p-integral off p | d");
            assert_eq!(l_neg_pm1_mod(p, e, chi).unwrap(), want, "p = {p} e = {e} d = {d}");
        }
    }
}

// ---- rationality layer consistency ----

#[test]
fn scan_real_rows_are_self_consistent() {
    let rows = scan_real(5, 300).unwrap();
    assert!(!rows.is_empty());
    for row in &rows {
        assert!(is_fundamental_discriminant(row.d));
        let again = is_p_rational_real(row.d, 5).unwrap();
        assert_eq!(again.verdict, row.verdict, "d = {}", row.d);
        assert_eq!(again.valuation, row.valuation);
        match row.verdict {
            Verdict::PRational => assert_eq!(row.valuation, Some(0)),
            Verdict::NotPRational => assert!(row.valuation.unwrap() > 0),
            Verdict::NotApplicable => {
                assert_eq!(row.d % 5, 0);
                assert!(row.l_value.is_none());
            }
            Verdict::Inconclusive => panic!("real scan never defers"),
        }
    }
}

// ---- streaming residues vs exact series, full-range comparison ----

#[test]
fn streaming_h1_matches_exact_series_everywhere() {
    let n = 5000;
    let exact = h1_series(5, n).unwrap();
    let reduced = reduce_mod(&exact, 5, 2).unwrap();
    let streamed = h1_residues(5, 2, n).unwrap();
    assert_eq!(reduced, streamed);
}

#[test]
fn streaming_g_matches_exact_series_everywhere() {
    let n = 2000;
    let exact = g_series(5, &[3], n).unwrap();
    let reduced = reduce_mod(&exact, 5, 2).unwrap();
    let streamed = g_residues(5, &[3], 2, n).unwrap();
    assert_eq!(reduced, streamed);
    let n = 900;
    let exact = g_series(7, &[3, 5], n).unwrap();
    let reduced = reduce_mod(&exact, 7, 3).unwrap();
    let streamed = g_residues(7, &[3, 5], 3, n).unwrap();
    assert_eq!(reduced, streamed);
}

// ---- randomized series algebra ----

fn coeff_strategy() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=24).prop_map(|(n, d)| rat(n, d))
}

fn series_strategy() -> impl Strategy<Value = QExpansion> {
    prop::collection::vec(coeff_strategy(), 9..=33)
        .prop_map(|coeffs| QExpansion::new(coeffs, 1, 4, QuadCharacter::trivial()))
}

fn int_series_strategy() -> impl Strategy<Value = QExpansion> {
    prop::collection::vec(-60i64..=60, 9..=33).prop_map(|vals| ints(&vals))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_mul_commutes(f in series_strategy(), g in series_strategy()) {
        let fg = qs_mul(&f, &g);
        let gf = qs_mul(&g, &f);
        prop_assert_eq!(fg.coeffs(), gf.coeffs());
    }

    #[test]
    fn prop_mul_distributes(f in series_strategy(), g in series_strategy(), h in series_strategy()) {
        let lhs = qs_mul(&f, &g.add(&h));
        let rhs = qs_mul(&f, &g).add(&qs_mul(&f, &h));
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn prop_b_operator_composition(f in series_strategy(), m in 1u64..=6, k in 1u64..=6) {
        let two_step = op_b(&op_b(&f, m), k);
        let by_lcm = op_b(&f, m.lcm(&k));
        prop_assert_eq!(two_step.coeffs(), by_lcm.coeffs());
        if m.gcd(&k) == 1 {
            let by_product = op_b(&f, m * k);
            prop_assert_eq!(two_step.coeffs(), by_product.coeffs());
        }
    }

    #[test]
    fn prop_twist_squares_to_gcd_filter(f in series_strategy(), di in 0usize..=4) {
        let psi = QuadCharacter::new([5, 8, -4, 12, -7][di]).unwrap();
        let twice = op_twist(&op_twist(&f, psi), psi);
        let cond = psi.conductor() as i64;
        for n in 0..=f.prec() {
            if (n as i64).gcd(&cond) == 1 && n > 0 {
                prop_assert_eq!(twice.coeff(n), f.coeff(n));
            } else {
                prop_assert!(twice.coeff(n).is_zero());
            }
        }
    }

    #[test]
    fn prop_restrict_direct_equals_composed(f in series_strategy(), li in 0usize..=2) {
        let ell = [3u64, 5, 7][li];
        let direct = op_restrict(&f, ell).unwrap();
        // the composed operator path: half the off-multiples plus half their twist
        let ell_star = if ell % 4 == 1 { ell as i64 } else { -(ell as i64) };
        let psi = QuadCharacter::new(ell_star).unwrap();
        let off = f.add(&op_b(&f, ell).scale(&rat(-1, 1)));
        let composed = off.scale(&rat(1, 2)).add(&op_twist(&off, psi).scale(&rat(1, 2)));
        prop_assert_eq!(direct.coeffs(), composed.coeffs());
        // projection
        let again = op_restrict(&direct, ell).unwrap();
        prop_assert_eq!(again.coeffs(), direct.coeffs());
    }

    #[test]
    fn prop_hecke_is_linear(f in series_strategy(), g in series_strategy(), li in 0usize..=2) {
        let ell = [2u64, 3, 5][li];
        let psi = QuadCharacter::new(5).unwrap();
        let fg = f.add(&g);
        let lhs = hecke(&fg, ell, 9, psi).unwrap();
        let rhs = hecke(&f, ell, 9, psi).unwrap().add(&hecke(&g, ell, 9, psi).unwrap());
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn prop_hecke_commutes_with_reduction(f in int_series_strategy(), li in 0usize..=2) {
        let ell = [2u64, 3, 7][li];
        let psi = QuadCharacter::new(-4).unwrap();
        let exact_then_reduce = reduce_mod(&hecke(&f, ell, 9, psi).unwrap(), 5, 2).unwrap();
        let reduce_then_residue =
            hecke_residue(&reduce_mod(&f, 5, 2).unwrap(), ell, 9, psi).unwrap();
        prop_assert_eq!(exact_then_reduce, reduce_then_residue);
    }

    #[test]
    fn prop_qexp_roundtrips(f in series_strategy()) {
        let mut buf = Vec::new();
        write_qexp(&mut buf, &f).unwrap();
        let back = read_qexp(buf.as_slice()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn prop_residue_roundtrips(vals in prop::collection::vec(0u64..625, 5..=40)) {
        let f = ResidueSeries { coeffs: vals, p: 5, e: 4 };
        let mut buf = Vec::new();
        write_residue(&mut buf, &f).unwrap();
        let back = read_residue(buf.as_slice()).unwrap();
        prop_assert_eq!(back, f);
    }
}
