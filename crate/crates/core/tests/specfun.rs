use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use riesz::specfun::*;

// ---- independent oracles ----

/// Spouge's approximation with a = 12 for Gamma(z), Re z > 0.
fn spouge_gamma(z: Complex64) -> Complex64 {
    let a = 12.0f64;
    let z = z - 1.0;
    let mut sum = Complex64::new((2.0 * PI).sqrt(), 0.0);
    let mut fact = 1.0f64;
    for k in 1..(a as usize) {
        let kf = k as f64;
        let c = (if k % 2 == 1 { 1.0 } else { -1.0 }) / fact * (a - kf).powf(kf - 0.5) * (a - kf).exp();
        sum += c / (z + kf);
        fact *= kf;
    }
    (z + a).powc(z + 0.5) * (-(z + a)).exp() * sum
}

fn oracle_gamma_real(x: f64) -> f64 {
    // shift into the range where Spouge is accurate, then recur down
    let mut shift = 1.0;
    let mut y = x;
    while y < 8.0 {
        shift *= y;
        y += 1.0;
    }
    spouge_gamma(Complex64::new(y, 0.0)).re / shift
}

/// Ascending series for J_nu.
fn series_j(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powf(nu) / oracle_gamma_real(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Integer-order ascending series for Y_1.
fn series_y1(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut ck = 1.0; // q^k / (k! (k+1)!)
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = 1.0 - EULER_GAMMA;
    let mut j1 = 0.0;
    let mut s = 0.0;
    for k in 0..100 {
        j1 += ck;
        s += (psi_a + psi_b) * ck;
        let k1 = (k + 1) as f64;
        ck *= q / (k1 * (k1 + 1.0));
        psi_a += 1.0 / k1;
        psi_b += 1.0 / (k1 + 1.0);
    }
    -1.0 / (PI * half) + 2.0 / PI * half.ln() * half * j1 - half / PI * s
}

/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoid rule.
fn integral_k(nu: f64, x: f64) -> f64 {
    let h = 0.01f64;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += v;
        if v < 1e-300 || v < 1e-20 * sum {
            break;
        }
        t += h;
    }
    sum * h
}

// ---- log-gamma ----

#[test]
fn log_gamma_trivial_points() {
    assert!(log_gamma(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
    let half = log_gamma(Complex64::new(0.5, 0.0)).unwrap();
    assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14 && half.im.abs() < 1e-15);
}

#[test]
fn log_gamma_matches_spouge_oracle() {
    let z = Complex64::new(5.0, 3.0);
    let ours = log_gamma(z).unwrap().exp();
    let oracle = spouge_gamma(z);
    assert!((ours / oracle - 1.0).norm() < 1e-9);
    // frozen high-precision principal-branch values
    for (re, im, lre, lim) in [
        (5.0f64, 3.0f64, 2.2442467170202177f64, 4.7140895389049294f64),
        (-3.7, 2.2, -7.2597693499705797, -9.94018845107855),
        (0.2, -40.0, -63.019573374362728, -107.08385592311395),
        (-20.3, 150.0, -338.98796437795946, 567.48545620005199),
    ] {
        let v = log_gamma(Complex64::new(re, im)).unwrap();
        let scale = 1.0f64.max(lre.abs()).max(lim.abs());
        assert!((v.re - lre).abs() < 1e-13 * scale, "{re}+{im}i: {v}");
        assert!((v.im - lim).abs() < 1e-13 * scale, "{re}+{im}i: {v}");
    }
}

#[test]
fn log_gamma_reproduces_factorials() {
    let mut fact = 1.0f64;
    for n in 1..30 {
        let g = log_gamma(Complex64::new(n as f64, 0.0)).unwrap().exp();
        assert!((g.re / fact - 1.0).abs() < 1e-12, "n={n}");
        fact *= n as f64;
    }
}

#[test]
fn log_gamma_pole_flag() {
    for n in [0.0, -1.0, -7.0] {
        assert!(matches!(log_gamma(Complex64::new(n, 0.0)), Err(riesz::Error::Pole(_))));
    }
}

proptest! {
    #[test]
    fn log_gamma_recurrence(re in -30.0f64..30.0, im in -60.0f64..60.0) {
        prop_assume!(im.abs() > 1e-3);
        let z = Complex64::new(re, im);
        let lhs = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln()).exp();
        prop_assert!((lhs - 1.0).norm() < 1e-11, "z={} deviation {}", z, (lhs - 1.0).norm());
    }

    #[test]
    fn log_gamma_against_spouge(re in 0.5f64..20.0, im in -20.0f64..20.0) {
        let z = Complex64::new(re, im);
        let ratio = log_gamma(z).unwrap().exp() / spouge_gamma(z);
        prop_assert!((ratio - 1.0).norm() < 1e-9);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn digamma_recurrence(x in 0.01f64..50.0) {
        let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
        prop_assert!(d.abs() < 1e-10);
    }
}

// ---- digamma and Euler's constant ----

#[test]
fn digamma_classical_values() {
    let ln2 = std::f64::consts::LN_2;
    assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
    assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * ln2).abs() < 1e-13);
    assert!((digamma(1.5).unwrap() - (2.0 - EULER_GAMMA - 2.0 * ln2)).abs() < 1e-13);
    assert!(matches!(digamma(0.0), Err(riesz::Error::Pole(_))));
    assert!(matches!(digamma(-3.0), Err(riesz::Error::Pole(_))));
}

#[test]
fn euler_gamma_oracles() {
    // Euler-Maclaurin at n = 10: H_n - ln n - 1/(2n) + sum B_2k / (2k n^2k)
    let n = 10.0f64;
    let h: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
    let em = h - n.ln() - 0.5 / n + 1.0 / (12.0 * n.powi(2)) - 1.0 / (120.0 * n.powi(4))
        + 1.0 / (252.0 * n.powi(6))
        - 1.0 / (240.0 * n.powi(8))
        + 1.0 / (132.0 * n.powi(10))
        - 691.0 / (32760.0 * n.powi(12))
        + 1.0 / (12.0 * n.powi(14));
    assert!((euler_gamma() - em).abs() < 5e-15);
    assert!((euler_gamma() - 0.577_215_664_901_532_86).abs() < 1e-15);
    assert!((digamma(1.0).unwrap() + euler_gamma()).abs() < 1e-14);
    let big_n = 1_000_000u32;
    let harmonic = neumaier_sum((1..=big_n).map(|k| 1.0 / k as f64));
    let gap = harmonic - (big_n as f64).ln() - euler_gamma();
    assert!(gap > 0.0 && gap < 1.0 / big_n as f64);
}

// ---- Bessel functions ----

#[test]
fn bessel_against_ascending_series() {
    for &nu in &[-0.5, -0.25, 0.0, 0.5, 1.0, 1.7, 3.0, 5.0] {
        for &x in &[0.1, 0.7, 1.5, 2.5, 4.0, 6.0, 9.0] {
            let got = bessel_j(nu, x).unwrap();
            let want = series_j(nu, x);
            assert!((got - want).abs() < 1e-12, "J_{nu}({x}): {got} vs {want}");
        }
    }
    for &x in &[0.2, 1.0, 1.99, 2.01, 3.5, 6.0] {
        let got = bessel_y(1.0, x).unwrap();
        assert!((got - series_y1(x)).abs() < 1e-12, "Y_1({x})");
    }
    // non-integer order through the reflection of two J series
    for &nu in &[0.3, 2.6] {
        for &x in &[0.5, 3.0, 8.0] {
            let (s, c) = (PI * nu).sin_cos();
            let want = (series_j(nu, x) * c - series_j(-nu, x)) / s;
            assert!((bessel_y(nu, x).unwrap() - want).abs() < 1e-11, "Y_{nu}({x})");
        }
    }
}

#[test]
fn bessel_published_table_values() {
    let y1 = bessel_y(1.0, 1.0).unwrap();
    assert!((y1 - series_y1(1.0)).abs() < 1e-14);
    assert!((y1 - (-0.7812128213)).abs() < 1e-10);
    let k1 = bessel_k(1.0, 1.0).unwrap();
    assert!((k1 - integral_k(1.0, 1.0)).abs() < 1e-14);
    assert!((k1 - 0.6019072302).abs() < 1e-10);
}

#[test]
fn bessel_k_against_integral_representation() {
    for &nu in &[0.0, 0.25, 0.5, 1.0, 2.5, 4.0, 5.0] {
        for &x in &[0.05, 0.5, 1.9, 2.1, 5.0, 20.0, 60.0] {
            let got = bessel_k(nu, x).unwrap();
            let want = integral_k(nu, x);
            assert!((got - want).abs() <= 1e-12 * want.max(1.0), "K_{nu}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn bessel_frozen_high_precision_values() {
    // (nu, x, J, Y, K) from a 30-digit reference
    let table = [
        (0.0, 0.5, 0.9384698072408129, -0.44451873350670656, 0.92441907122766586),
        (1.0, 3.3, 0.22066345298524116, 0.38785293102370989, 0.028116934272716618),
        (2.5, 10.0, 0.19665848358181841, -0.16417847961494106, 2.3931325864627889e-5),
        (5.0, 1.0, 0.00024975773021123443, -260.40586662581222, 360.9605896012407),
        (5.0, 40.0, 0.12257346597711779, 0.031869448780850364, 1.1423814375953183e-18),
        (0.3, 120.0, 0.058516223977010616, -0.04337034506871152, 8.7668414762859245e-54),
        (-0.5, 7.0, 0.22735582387482852, 0.19812877407634482, 0.00043196598040526125),
        (4.0, 199.0, -0.053443234077485232, -0.01853513954655782, 3.4767563047245599e-88),
    ];
    for (nu, x, j, y, k) in table {
        let (nu, x, j, y, k): (f64, f64, f64, f64, f64) = (nu, x, j, y, k);
        assert!((bessel_j(nu, x).unwrap() - j).abs() < 1e-13, "J_{nu}({x})");
        assert!((bessel_y(nu, x).unwrap() - y).abs() < 1e-12 * y.abs().max(1.0), "Y_{nu}({x})");
        assert!((bessel_k(nu, x).unwrap() - k).abs() < 1e-13 * k.max(1.0), "K_{nu}({x})");
    }
}

#[test]
fn bessel_wronskian_by_finite_differences() {
    let d = 1e-5;
    for i in 0..100 {
        let x = 0.5 + 1.95 * i as f64;
        let nu = -0.5 + 5.5 * (i as f64 / 99.0);
        let j = bessel_j(nu, x).unwrap();
        let y = bessel_y(nu, x).unwrap();
        let jp = (bessel_j(nu, x + d).unwrap() - bessel_j(nu, x - d).unwrap()) / (2.0 * d);
        let yp = (bessel_y(nu, x + d).unwrap() - bessel_y(nu, x - d).unwrap()) / (2.0 * d);
        let w = j * yp - jp * y;
        assert!((w - 2.0 / (PI * x)).abs() < 1e-6, "nu={nu} x={x}: {w}");
    }
}

#[test]
fn bessel_k_recurrence_on_grid() {
    for i in 1..=40 {
        let x = 0.25 * i as f64;
        for &nu in &[0.5, 1.0, 1.5, 2.0, 3.3, 4.0] {
            let lhs = bessel_k(nu - 1.0, x).unwrap() - bessel_k(nu + 1.0, x).unwrap();
            let rhs = -(2.0 * nu / x) * bessel_k(nu, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "nu={nu} x={x}");
        }
    }
}

#[test]
fn bessel_domain_errors() {
    assert!(matches!(bessel_j(1.0, 0.0), Err(riesz::Error::Domain(_))));
    assert!(matches!(bessel_y(1.0, -1.0), Err(riesz::Error::Domain(_))));
    assert!(matches!(bessel_k(0.0, 0.0), Err(riesz::Error::Domain(_))));
    assert!(matches!(voronoi_kernel_i(1.0, 0.0), Err(riesz::Error::Domain(_))));
}

// ---- Voronoi kernel ----

#[test]
fn voronoi_kernel_values() {
    let at4 = voronoi_kernel_i(1.0, 4.0).unwrap();
    let from_parts = -bessel_y(1.0, 4.0).unwrap() - 2.0 / PI * bessel_k(1.0, 4.0).unwrap();
    assert!((at4 - from_parts).abs() < 1e-15);
    assert!((at4 - (-0.40587295277706379)).abs() < 1e-13);

    // small z: bounded, and equal to the leading terms of the fused expansion
    let z = 1e-4;
    let v = voronoi_kernel_i(1.0, z).unwrap();
    let half = 0.5 * z;
    let leading = -4.0 / PI * half.ln() * half + z / PI * (1.0 - 2.0 * EULER_GAMMA);
    assert!((v - leading).abs() < 1e-10);
    assert!((v - 0.00062555989723278998).abs() < 1e-16);

    // half-integer reduction
    let z = 3.0;
    let half_order = (2.0 / (PI * z)).sqrt() * z.cos() - 2.0 / PI * (PI / (2.0 * z)).sqrt() * (-z).exp();
    assert!((voronoi_kernel_i(0.5, z).unwrap() - half_order).abs() < 1e-14);
}

#[test]
fn voronoi_kernel_envelope() {
    let mut worst: f64 = 0.0;
    for i in 0..=900 {
        let z = 50.0 + 0.5 * i as f64;
        worst = worst.max(voronoi_kernel_i(1.0, z).unwrap().abs() * z.sqrt());
    }
    assert!(worst <= (2.0 / PI).sqrt() * 1.01, "{worst}");
}

#[test]
fn voronoi_kernel_continuous_across_series_switch() {
    let below = voronoi_kernel_i(1.0, 2.0).unwrap();
    let above = voronoi_kernel_i(1.0, 2.0 + 1e-12).unwrap();
    assert!((below - above).abs() < 1e-12);
}
