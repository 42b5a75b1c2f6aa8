use num_complex::Complex64;
use riesz::arith::{FieldContext, FundamentalDiscriminant};
use riesz::characters::{character_group, even_characters, kronecker_character, Character};
use riesz::lfunc::*;
use riesz::specfun::EULER_GAMMA;

/// `(D, L(1, chi_D), L'(1, chi_D))` from mpmath's `dirichlet` at 25 digits.
const MPMATH: [(i64, f64, f64); 3] = [
    (5, 0.43040894096400403889, 0.35624064703076149886),
    (8, 0.62322524014023051339, 0.39395000150641812877),
    (12, 0.76034599630094634753, 0.36249491066055621212),
];

/// Plain partial sums of `sum chi(n)/n`, averaged over a full period to damp
/// the boundary term.
fn slow_l1<C: Character>(chi: &C, periods: u64) -> Complex64 {
    let q = chi.modulus();
    let mut s = Complex64::new(0.0, 0.0);
    let mut avg = Complex64::new(0.0, 0.0);
    let n_end = periods * q;
    for n in 1..=n_end + q {
        s += chi.value(n as i64) / n as f64;
        if n > n_end {
            avg += s;
        }
    }
    avg / q as f64
}

#[test]
fn log_sine_and_series_routes_agree() {
    for q in [5u64, 7, 11, 13] {
        for chi in even_characters(q).unwrap().iter().filter(|c| !c.is_principal()) {
            let a = l1_logsin(chi).unwrap();
            let b = l1_series(chi).unwrap();
            assert!((a - b).norm() <= 1e-8, "q={q} j={}: {a} vs {b}", chi.index());
        }
    }
    for d in [5, 8, 12, 13] {
        let chi = kronecker_character(d).unwrap();
        let a = l1_logsin(&chi).unwrap();
        let b = l1_series(&chi).unwrap();
        assert!((a - b).norm() <= 1e-8, "D={d}");
        assert!(a.im.abs() < 1e-14);
    }
}

#[test]
fn series_matches_slow_partial_sums() {
    for q in [5u64, 7] {
        for chi in character_group(q).unwrap().iter().filter(|c| !c.is_principal()) {
            let fast = l1_series(chi).unwrap();
            let slow = slow_l1(chi, 20_000);
            assert!((fast - slow).norm() <= 1e-6, "q={q} j={}", chi.index());
        }
    }
}

#[test]
fn odd_or_principal_rejected_by_log_sine() {
    let g = character_group(7).unwrap();
    assert!(l1_logsin(&g[0]).is_err());
    assert!(l1_logsin(&g[1]).is_err());
    assert!(l1_series(&g[0]).is_err());
}

#[test]
fn values_match_mpmath() {
    for (d, l1, lp) in MPMATH {
        let chi = kronecker_character(d).unwrap();
        assert!((l1_series(&chi).unwrap().re - l1).abs() <= 1e-12, "D={d}");
        assert!((lprime1_series(&chi).unwrap() - lp).abs() <= 1e-11, "D={d}");
    }
}

#[test]
fn class_number_fixtures_agree() {
    for d in [5, 8, 12, 13] {
        let fx = class_number_fixture(d).unwrap();
        let series = quadratic_laurent(FundamentalDiscriminant::new(d).unwrap()).unwrap();
        assert!((fx.residue() - series.residue).abs() <= 1e-8, "D={d}");
        let fixed = fixture_laurent(d).unwrap();
        assert_eq!(fixed.source, LaurentSource::ClassNumberFixture);
        assert!((fixed.const_term - series.const_term).abs() <= 1e-8);
        // fundamental unit has norm -1 or +1
        let norm = (fx.unit_a * fx.unit_a - d as f64 * fx.unit_b * fx.unit_b) / 4.0;
        assert!((norm.abs() - 1.0).abs() < 1e-12);
    }
    assert!(class_number_fixture(17).is_none());
}

#[test]
fn golden_ratio_residue() {
    // 2 log(phi) / sqrt 5
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let want = 2.0 * phi.ln() / 5f64.sqrt();
    let ctx = FieldContext::real_quadratic(5).unwrap();
    assert!((ctx.gamma_minus1 - want).abs() < 1e-13);
    assert!((ctx.gamma_0 - (EULER_GAMMA * want + MPMATH[0].2)).abs() < 1e-11);
    let q = laurent_data(&FieldContext::rational()).unwrap();
    assert_eq!((q.residue, q.const_term), (1.0, EULER_GAMMA));
}

#[test]
fn complex_derivative_is_conjugate_symmetric() {
    for chi in character_group(11).unwrap().iter().filter(|c| !c.is_principal()) {
        let a = lprime1_series_complex(chi).unwrap();
        let b = lprime1_series_complex(&chi.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-11);
    }
}
