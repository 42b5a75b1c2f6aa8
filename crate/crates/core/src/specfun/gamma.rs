use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

const LN_PI: f64 = 1.144_729_885_849_400_174_143_427_351_353_058_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_617_6;

/// `B_{2k} / (2k (2k-1))` for k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Taylor coefficients of `1/Gamma(1+z)` at z = 0.
pub(crate) const RGAMMA1P: [f64; 30] = [
    1.0,
    5.7721566490153286e-1,
    -6.5587807152025388e-1,
    -4.2002635034095236e-2,
    1.6653861138229149e-1,
    -4.2197734555544337e-2,
    -9.6219715278769736e-3,
    7.2189432466630995e-3,
    -1.1651675918590651e-3,
    -2.1524167411495097e-4,
    1.2805028238811619e-4,
    -2.0134854780788239e-5,
    -1.2504934821426707e-6,
    1.1330272319816959e-6,
    -2.0563384169776071e-7,
    6.1160951044814158e-9,
    5.0020076444692229e-9,
    -1.1812745704870201e-9,
    1.0434267116911005e-10,
    7.7822634399050713e-12,
    -3.6968056186422057e-12,
    5.100370287454476e-13,
    -2.0583260535665068e-14,
    -5.348122539423018e-15,
    1.2267786282382608e-15,
    -1.1812593016974588e-16,
    1.1866922547516003e-18,
    1.4123806553180318e-18,
    -2.2987456844353702e-19,
    1.7144063219273374e-20,
];

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal branch of `log Gamma(z)`, continuous on the plane slit along
/// the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("log_gamma at {}", z.re)));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma at non-finite {z}")));
    }
    Ok(ln_gamma(z))
}

/// Unchecked principal `log Gamma`; poles yield non-finite output.
#[inline]
pub(crate) fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let reflected = LN_PI - ln_sin_pi(z) - ln_gamma_right(Complex64::new(1.0, 0.0) - z);
        if z.im == 0.0 {
            reflected
        } else {
            let turns = (0.5 * z.re + 0.25).floor() * z.im.signum();
            reflected + Complex64::new(0.0, 2.0 * PI * turns)
        }
    } else {
        ln_gamma_right(z)
    }
}

/// `log Gamma` for Re z >= 1/2 via upward shift and Stirling's series.
#[inline]
fn ln_gamma_right(mut z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm_sqr() < 100.0 {
        shift += z.ln();
        z += 1.0;
    }
    stirling(z) - shift
}

#[inline]
fn stirling(z: Complex64) -> Complex64 {
    let r = z.norm_sqr();
    let terms = if r > 2500.0 {
        4
    } else if r > 400.0 {
        6
    } else {
        STIRLING.len()
    };
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(STIRLING[terms - 1], 0.0);
    for c in STIRLING[..terms - 1].iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series * inv
}

/// `sin(pi t)` with argument reduction for large |t|.
pub(crate) fn sin_pi(t: f64) -> f64 {
    let r = t - 2.0 * (0.5 * t).round();
    (PI * r).sin()
}

pub(crate) fn cos_pi(t: f64) -> f64 {
    let r = t - 2.0 * (0.5 * t).round();
    (PI * r).cos()
}

/// Principal logarithm of `sin(pi z)`, safe against overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    let (a, b) = (z.re, z.im);
    if b < 15.0 {
        let s = Complex64::new(sin_pi(a) * (PI * b).cosh(), cos_pi(a) * (PI * b).sinh());
        return s.ln();
    }
    // sin(pi z) = e^{pi b} e^{-i pi a} (i/2) (1 - e^{2 pi i z})
    let q = Complex64::new(0.0, 2.0 * PI * a).exp() * (-2.0 * PI * b).exp();
    let mut out = Complex64::new(PI * b - std::f64::consts::LN_2, PI * (0.5 - a))
        + (Complex64::new(1.0, 0.0) - q).ln();
    out.im -= 2.0 * PI * (out.im / (2.0 * PI)).round();
    out
}

/// Gamma function on the real line.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.round() {
        return Err(Error::Pole(format!("gamma at {x}")));
    }
    if x < 0.5 {
        return Ok(PI / (sin_pi(x) * gamma(1.0 - x)?));
    }
    Ok(ln_gamma_right(Complex64::new(x, 0.0)).re.exp())
}

/// `log |Gamma(x)|` for real x > 0.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma_real needs x > 0, got {x}")));
    }
    Ok(ln_gamma_right(Complex64::new(x, 0.0)).re)
}

/// Digamma function `psi = Gamma'/Gamma` on the real line.
pub fn digamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.round() {
        return Err(Error::Pole(format!("digamma at {x}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("digamma at {x}")));
    }
    if x < 0.5 {
        // psi(1 - x) - psi(x) = pi cot(pi x)
        return Ok(digamma(1.0 - x)? - PI * cos_pi(x) / sin_pi(x));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(x.ln() - 0.5 / x - tail - shift)
}

/// Returns `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))` for |mu| <= 1/2, where
/// `gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)` and `gam2` is their mean.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mu2 = mu * mu;
    for k in (0..RGAMMA1P.len()).rev() {
        if k % 2 == 0 {
            even = even * mu2 + RGAMMA1P[k];
        } else {
            odd = odd * mu2 + RGAMMA1P[k];
        }
    }
    // even = sum c_{2j} mu^{2j}, odd = sum c_{2j+1} mu^{2j}
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temme_gammas_at_zero() {
        let (g1, g2, p, m) = temme_gammas(0.0);
        assert!((g1 + EULER_GAMMA).abs() < 1e-16);
        assert_eq!((g2, p, m), (1.0, 1.0, 1.0));
        let (_, _, p, m) = temme_gammas(0.5);
        let inv_sqrt_pi = 1.0 / PI.sqrt();
        assert!((p - 2.0 * inv_sqrt_pi).abs() < 1e-15);
        assert!((m - inv_sqrt_pi).abs() < 1e-15);
    }

    #[test]
    fn reflection_branch_is_continuous_across_re_half() {
        for &im in &[0.3, 7.0, 40.0, -3.0] {
            let a = ln_gamma(Complex64::new(0.5 - 1e-9, im));
            let b = ln_gamma(Complex64::new(0.5 + 1e-9, im));
            assert!((a - b).norm() < 1e-6, "{im}: {a} vs {b}");
        }
    }
}
