use std::f64::consts::{FRAC_2_PI, PI};

use super::gamma::{cos_pi, sin_pi, temme_gammas, EULER_GAMMA};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-30;
const MAXIT: usize = 1_000_000;
const TEMME_MAX_X: f64 = 2.0;
const HANKEL_MIN_X: f64 = 25.0;

fn check_arg(name: &str, nu: f64, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("{name}: argument must be positive, got {x}")));
    }
    if !nu.is_finite() {
        return Err(Error::Domain(format!("{name}: order must be finite, got {nu}")));
    }
    Ok(())
}

/// Bessel function of the first kind.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_arg("bessel_j", nu, x)?;
    Ok(jy(nu, x).0)
}

/// Bessel function of the second kind.
pub fn bessel_y(nu: f64, x: f64) -> Result<f64> {
    check_arg("bessel_y", nu, x)?;
    Ok(jy(nu, x).1)
}

/// Modified Bessel function of the second kind.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    check_arg("bessel_k", nu, x)?;
    Ok(k_nonneg(nu.abs(), x))
}

/// The Voronoi kernel `-Y_nu(z) - (2/pi) K_nu(z)`.
///
/// For integer order and small z the leading singular parts of the two
/// Bessel functions are cancelled term by term in a single series.
pub fn voronoi_kernel_i(nu: f64, z: f64) -> Result<f64> {
    check_arg("voronoi_kernel_i", nu, z)?;
    let n = nu.round();
    if (nu - n).abs() < 1e-15 && n >= 1.0 && z <= 2.0 {
        return Ok(voronoi_fused_series(n as u32, z));
    }
    let (_, y) = jy(nu, z);
    Ok(-y - FRAC_2_PI * k_nonneg(nu.abs(), z))
}

/// `(J_nu(x), Y_nu(x))` for any real order.
fn jy(nu: f64, x: f64) -> (f64, f64) {
    if nu >= 0.0 {
        return jy_nonneg(nu, x);
    }
    let mu = -nu;
    let (j, y) = jy_nonneg(mu, x);
    let (c, s) = (cos_pi(mu), sin_pi(mu));
    (c * j - s * y, s * j + c * y)
}

fn jy_nonneg(nu: f64, x: f64) -> (f64, f64) {
    if x >= HANKEL_MIN_X && x >= 2.0 * nu * nu {
        return jy_hankel(nu, x);
    }
    jy_steed(nu, x)
}

/// Hankel's asymptotic expansion, truncated at its smallest term.
fn jy_hankel(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        let mag = term.abs();
        if mag > prev {
            break;
        }
        prev = mag;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// Temme's series (x < 2) or Steed's method (x >= 2), tied to order `nu` by
/// continued-fraction ratios and recurrence.
fn jy_steed(nu: f64, x: f64) -> (f64, f64) {
    let nl = if x < TEMME_MAX_X {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_nu / J_nu
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < TEMME_MAX_X {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                break;
            }
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2: p + iq
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        for i in 2..MAXIT {
            a += 2.0 * (i - 1) as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            let temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                break;
            }
        }
        let gam = (p - f) / q;
        let mut j = (w / ((p - f) * gam + q)).sqrt();
        j = j.copysign(rjl);
        rjmu = j;
        rymu = j * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let rj = rjl1 * (rjmu / rjl);
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    (rj, rymu)
}

/// `K_nu(x)` for nu >= 0: Temme's series or Steed's CF2 at |mu| <= 1/2, then
/// forward recurrence.
fn k_nonneg(nu: f64, x: f64) -> f64 {
    let nl = (nu + 0.5) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    let (mut rkmu, mut rk1);
    if x < TEMME_MAX_X {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAXIT {
            a -= 2.0 * (i - 1) as f64;
            c = -a * c / i as f64;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    rkmu
}

/// `-Y_n(z) - (2/pi) K_n(z)` from the integer-order ascending series of both
/// functions, with the matching singular and logarithmic terms combined.
fn voronoi_fused_series(n: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    let nf = n as usize;
    let mut factorials = vec![1.0f64; nf + 1];
    for k in 1..=nf {
        factorials[k] = factorials[k - 1] * k as f64;
    }

    // (1/pi) (z/2)^{-n} sum_{k<n} (n-k-1)!/k! q^k [1 - (-1)^k]
    let mut singular = 0.0;
    let mut qk = 1.0;
    for k in 0..nf {
        if k % 2 == 1 {
            singular += 2.0 * factorials[nf - k - 1] / factorials[k] * qk;
        }
        qk *= q;
    }
    singular *= half.powi(-(n as i32)) / PI;

    // J_n + (-1)^{n+1} I_n and the digamma series share the term c_k = q^k / (k! (n+k)!)
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut log_part = 0.0;
    let mut psi_part = 0.0;
    let mut ck = 1.0 / factorials[nf];
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = -EULER_GAMMA + (1..=nf).map(|j| 1.0 / j as f64).sum::<f64>();
    for k in 0..200usize {
        let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
        log_part += ck * (alt - sign_n);
        psi_part += ck * (psi_a + psi_b) * (alt - sign_n);
        if ck * (1.0 + psi_b.abs()) < 1e-18 * (log_part.abs() + psi_part.abs() + 1e-300) {
            break;
        }
        let k1 = (k + 1) as f64;
        ck *= q / (k1 * (nf as f64 + k1));
        psi_a += 1.0 / k1;
        psi_b += 1.0 / (nf as f64 + k1);
    }
    let hn = half.powi(n as i32);
    singular - FRAC_2_PI * half.ln() * hn * log_part + hn * psi_part / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_forms() {
        for &x in &[0.3, 1.0, 2.0, 7.5, 30.0, 150.0] {
            let amp = (2.0 / (PI * x)).sqrt();
            assert!((bessel_j(0.5, x).unwrap() - amp * x.sin()).abs() < 1e-14);
            assert!((bessel_y(0.5, x).unwrap() + amp * x.cos()).abs() < 1e-14);
            assert!((bessel_j(-0.5, x).unwrap() - amp * x.cos()).abs() < 1e-14);
            let k = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((bessel_k(0.5, x).unwrap() - k).abs() < 1e-15);
        }
    }

    #[test]
    fn fused_series_matches_direct_combination_at_moderate_z() {
        for &z in &[0.5, 1.0, 1.9] {
            let (_, y) = jy(1.0, z);
            let direct = -y - FRAC_2_PI * k_nonneg(1.0, z);
            assert!((voronoi_fused_series(1, z) - direct).abs() < 1e-13, "z={z}");
            let (_, y2) = jy(2.0, z);
            let direct2 = -y2 - FRAC_2_PI * k_nonneg(2.0, z);
            assert!((voronoi_fused_series(2, z) - direct2).abs() < 1e-12, "z={z}");
        }
    }
}
