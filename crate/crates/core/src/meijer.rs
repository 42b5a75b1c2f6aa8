//! Mellin-Barnes evaluation of the kernels
//! `G_{2m,0}^{0,m}(y | 1/2 (m times), rho + 1, 0 (m - 1 times); -)`.
//!
//! The integrand `Gamma(1/2 + s)^m y^s / (Gamma(rho + 1 - s) Gamma(-s)^{m-1})`
//! has poles only at `s = -1/2 - k`, so any path starting on the real axis to
//! the right of `-1/2` and escaping to infinity in the upper half plane
//! (mirrored below) is admissible. Two paths are used: a vertical segment that
//! bends to the upper left, and for small `y` a straight steepest-descent line
//! through the saddle near `s = i y^{-1/(2m)}`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{bessel_j, ln_gamma, voronoi_kernel_i};

/// Above this saddle height the straight saddle line is used.
const SADDLE_MIN_HEIGHT: f64 = 8.0;
/// Half-width of the saddle window in units of the Gaussian width.
const SADDLE_HALF_WIDTH: f64 = 9.0;
const MAX_HALVINGS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourChoice {
    Auto,
    Bent,
    Saddle,
}

/// Parameters and evaluation policy for one kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerKernelSpec {
    pub m: u32,
    pub rho: f64,
    /// Real point where the path leaves the real axis; must exceed `-1/2`.
    pub contour_abscissa: f64,
    /// Length of the bent path beyond its bend.
    pub tail_cutoff: f64,
    /// Initial trapezoid step along the bent path.
    pub step: f64,
    /// Accepted `est_abs_error / max(1, |value|)`.
    pub tol: f64,
    pub contour: ContourChoice,
}

impl MeijerKernelSpec {
    pub fn new(m: u32, rho: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("kernel order m must be >= 2, got {m}")));
        }
        let floor = (m as f64 - 3.0) / 2.0;
        if !(rho > floor) || !rho.is_finite() {
            return Err(Error::Hypothesis(format!(
                "kernel needs rho > r1/2 - 1 = {floor} for m = {m}, got {rho}"
            )));
        }
        Ok(MeijerKernelSpec {
            m,
            rho,
            contour_abscissa: 0.25,
            tail_cutoff: 56.0 / (2.0 * m as f64 * std::f64::consts::LN_2) + 5.0,
            step: 0.1,
            tol: 1e-10,
            contour: ContourChoice::Auto,
        })
    }

    pub fn with_abscissa(mut self, c: f64) -> Result<Self> {
        if !(c > -0.5) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "contour abscissa must lie right of the pole at -1/2, got {c}"
            )));
        }
        self.contour_abscissa = c;
        Ok(self)
    }

    pub fn with_contour(mut self, contour: ContourChoice) -> Self {
        self.contour = contour;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Natural log of the Mellin-Barnes integrand.
    #[inline]
    pub fn ln_integrand(&self, s: Complex64, ln_y: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let m = self.m as f64;
        m * ln_gamma(s + 0.5) - ln_gamma(one * (self.rho + 1.0) - s) - (m - 1.0) * ln_gamma(-s) + s * ln_y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    MellinBarnes,
    BesselClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub est_abs_error: f64,
    pub method: KernelMethod,
}

pub fn g_kernel(spec: &MeijerKernelSpec, y: f64) -> Result<KernelValue> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("kernel argument must be positive, got {y}")));
    }
    g_kernel_ln(spec, y.ln())
}

/// Kernel at `y = exp(ln_y)`, for arguments far below the normal range.
pub fn g_kernel_ln(spec: &MeijerKernelSpec, ln_y: f64) -> Result<KernelValue> {
    if !ln_y.is_finite() {
        return Err(Error::Domain(format!("kernel log-argument must be finite, got {ln_y}")));
    }
    let height = (-ln_y / (2.0 * spec.m as f64)).exp();
    let saddle = match spec.contour {
        ContourChoice::Auto => height >= SADDLE_MIN_HEIGHT,
        ContourChoice::Bent => false,
        ContourChoice::Saddle => true,
    };
    if saddle {
        saddle_line(spec, ln_y, height)
    } else {
        bent_path(spec, ln_y, height)
    }
}

struct Estimate {
    value: f64,
    delta: f64,
    tail: f64,
    rounding: f64,
}

impl Estimate {
    fn error(&self) -> f64 {
        self.delta + self.tail + self.rounding
    }
}

/// Refines a trapezoid rule by halving the step until the estimate is met.
/// `eval(h, odd_only)` returns `(sum of Im(phi) at the requested nodes,
/// sum of |Im(phi)|, tail bound)` where the odd-only call supplies the new
/// midpoints for step `h`.
fn refine(
    spec: &MeijerKernelSpec,
    mut h: f64,
    mut eval: impl FnMut(f64, bool) -> (f64, f64, f64),
) -> Result<KernelValue> {
    let (mut sum, mut abs_sum, tail) = eval(h, false);
    let mut prev = sum * h / PI;
    for halving in 0..=MAX_HALVINGS {
        let (s_odd, a_odd, _) = eval(h / 2.0, true);
        sum += s_odd;
        abs_sum += a_odd;
        h /= 2.0;
        let est = Estimate {
            value: sum * h / PI,
            delta: 0.0,
            tail,
            rounding: 8.0 * f64::EPSILON * abs_sum * h / PI,
        };
        let est = Estimate {
            delta: (est.value - prev).abs(),
            ..est
        };
        if est.error() <= spec.tol * est.value.abs().max(1.0) {
            return Ok(KernelValue {
                value: est.value,
                est_abs_error: est.error(),
                method: KernelMethod::MellinBarnes,
            });
        }
        if halving == MAX_HALVINGS {
            return Err(Error::stalled(format!(
                "kernel m={} rho={} refinement stalled: value {:e}, error estimate {:e}",
                spec.m,
                spec.rho,
                est.value,
                est.error()
            )));
        }
        prev = est.value;
    }
    unreachable!()
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    0.5 * (1.0 + (0.5 * x).tanh())
}

/// Path `s(t) = c + i t - (g(t) - g(0))`, `g` a smoothed `max(|t| - T0, 0)`.
#[derive(Debug, Clone, Copy)]
struct BentPath {
    c: f64,
    bend: f64,
    g0: f64,
}

impl BentPath {
    fn new(c: f64, height: f64) -> Self {
        let bend = 2.0 * height.max(1.0);
        BentPath {
            c,
            bend,
            g0: 2.0 * softplus(-bend),
        }
    }

    #[inline]
    fn point(&self, t: f64) -> (Complex64, Complex64) {
        let g = softplus(t - self.bend) + softplus(-t - self.bend) - self.g0;
        let dg = logistic(t - self.bend) - logistic(-t - self.bend);
        (Complex64::new(self.c - g, t), Complex64::new(-dg, 1.0))
    }
}

fn bent_path(spec: &MeijerKernelSpec, ln_y: f64, height: f64) -> Result<KernelValue> {
    let path = BentPath::new(spec.contour_abscissa, height);
    let t_max = path.bend + spec.tail_cutoff;
    let decay = 1.0 / (2.0 * spec.m as f64 * std::f64::consts::LN_2);
    let phi = |t: f64| {
        let (s, ds) = path.point(t);
        spec.ln_integrand(s, ln_y).exp() * ds
    };
    refine(spec, spec.step, |h, odd_only| {
        let n = (t_max / h).ceil() as usize;
        let mut sum = 0.0;
        let mut abs = 0.0;
        let (start, stride) = if odd_only { (1, 2) } else { (0, 1) };
        let mut k = start;
        while k <= n {
            let v = phi(k as f64 * h).im;
            let w = if k == 0 { 0.5 } else { 1.0 };
            sum += w * v;
            abs += w * v.abs();
            k += stride;
        }
        let tail = phi(n as f64 * h).norm() * decay / PI;
        (sum, abs, tail)
    })
}

fn saddle_line(spec: &MeijerKernelSpec, ln_y: f64, height: f64) -> Result<KernelValue> {
    let sigma = (height / (2.0 * spec.m as f64)).sqrt();
    let dir = Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let origin = Complex64::new(spec.contour_abscissa, height);
    let lo = (-SADDLE_HALF_WIDTH * sigma).max(-std::f64::consts::SQRT_2 * height * 0.999);
    let hi = SADDLE_HALF_WIDTH * sigma;
    let phi = |tau: f64| spec.ln_integrand(origin + dir * tau, ln_y).exp() * dir;
    refine(spec, 0.5 * sigma, |h, odd_only| {
        let k_lo = (lo / h).ceil() as i64;
        let k_hi = (hi / h).floor() as i64;
        let mut sum = 0.0;
        let mut abs = 0.0;
        for k in k_lo..=k_hi {
            if odd_only && k.rem_euclid(2) == 0 {
                continue;
            }
            let v = phi(k as f64 * h).im;
            sum += v;
            abs += v.abs();
        }
        let ends = phi(k_lo as f64 * h).norm().max(phi(k_hi as f64 * h).norm());
        (sum, abs, ends * sigma / PI)
    })
}

/// `(1 / 2 pi i)` times the integral over the whole bent path, without
/// folding by conjugate symmetry; the imaginary part should vanish.
pub fn g_kernel_full_line(spec: &MeijerKernelSpec, y: f64) -> Result<Complex64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("kernel argument must be positive, got {y}")));
    }
    let ln_y = y.ln();
    let height = y.powf(-1.0 / (2.0 * spec.m as f64));
    let path = BentPath::new(spec.contour_abscissa, height);
    let t_max = path.bend + spec.tail_cutoff;
    let h = spec.step / 4.0;
    let n = (t_max / h).ceil() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let (s, ds) = path.point(k as f64 * h);
        acc += spec.ln_integrand(s, ln_y).exp() * ds;
    }
    Ok(acc * h / Complex64::new(0.0, 2.0 * PI))
}

/// `y^{-1/4} I_1(4 y^{-1/4})`, the `m = 2`, `rho = 0` kernel in closed form.
pub fn g_kernel_bessel_m2(rho: f64, y: f64) -> Result<f64> {
    if rho != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Bessel closed form is available only at rho = 0, got {rho}"
        )));
    }
    if !(y > 0.0) {
        return Err(Error::Domain(format!("kernel argument must be positive, got {y}")));
    }
    let r = y.powf(-0.25);
    Ok(r * voronoi_kernel_i(1.0, 4.0 * r)?)
}

/// Direct quadrature value of the iterated Bessel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeValue {
    pub value: f64,
    pub est_abs_error: f64,
    pub low_accuracy: bool,
}

const PROBE_TOL: f64 = 1e-3;
const PROBE_PERIODS: f64 = 2000.0;

fn gauss_legendre() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 10;
        (1..=n)
            .map(|i| {
                let mut z = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, z);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                    let dz = p1 / dp;
                    z -= dz;
                    if dz.abs() < 1e-16 {
                        break;
                    }
                }
                (z, 2.0 / ((1.0 - z * z) * dp * dp))
            })
            .collect()
    })
}

fn panel_sum(f: &impl Fn(f64) -> Result<f64>, a: f64, b: f64, width: f64) -> Result<(f64, f64)> {
    let nodes = gauss_legendre();
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let w = (b - a) / panels as f64;
    let mut sum = 0.0;
    let mut abs = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for &(z, wt) in nodes {
            let v = f(mid + 0.5 * w * z)? * wt * 0.5 * w;
            sum += v;
            abs += v.abs();
        }
    }
    Ok((sum, abs))
}

/// `int_0^inf u^rho J_{-1/2}(u) J_{rho+1/2}(x/u) du` at `m = 2`, evaluated
/// directly: `u <= 1` after the substitution `v = x/u`, `u >= 1` up to a whole
/// number of periods followed by an integration-by-parts tail.
pub fn iterated_kernel_probe(m: u32, rho: f64, x: f64) -> Result<ProbeValue> {
    if m != 2 {
        return Err(Error::InvalidArgument(format!("iterated probe supports m = 2 only, got {m}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("probe needs x > 0, got {x}")));
    }
    if !(rho > -0.5) {
        return Err(Error::Hypothesis(format!("probe needs rho > -1/2, got {rho}")));
    }
    let nu = rho + 0.5;
    let norm = (2.0 / PI).sqrt();
    let inner = |v: f64| -> Result<f64> {
        let u = x / v;
        Ok(norm * u.powf(rho - 0.5) * u.cos() * bessel_j(nu, v)? * x / (v * v))
    };
    let v_max = x + 2.0 * PI * PROBE_PERIODS;
    let (near, near_abs) = panel_sum(&inner, x, v_max, PI / 4.0)?;
    let near_tail = x.powf(rho + 0.5) * v_max.powf(-rho - 2.5);

    let amp = |u: f64| -> Result<f64> { Ok(norm * u.powf(rho - 0.5) * bessel_j(nu, x / u)?) };
    let outer = |u: f64| -> Result<f64> { Ok(amp(u)? * u.cos()) };
    let u_max = 2.0 * PI * PROBE_PERIODS;
    let (far, far_abs) = panel_sum(&outer, 1.0, u_max, PI / 4.0)?;
    let d = 1e-2;
    let slope = (amp(u_max + d)? - amp(u_max - d)?) / (2.0 * d);
    let third = (amp(u_max + 2.0 * d)? - 2.0 * amp(u_max + d)? + 2.0 * amp(u_max - d)?
        - amp(u_max - 2.0 * d)?)
        / (2.0 * d * d * d);
    let far_tail = -slope + third;

    let value = near + far + far_tail;
    let est = near_tail + third.abs() + 1e-13 * (near_abs + far_abs);
    Ok(ProbeValue {
        value,
        est_abs_error: est,
        low_accuracy: est > PROBE_TOL * value.abs().max(1.0),
    })
}

/// Memo of kernel values keyed by `(m, rho, y)` bit patterns.
#[derive(Debug, Default)]
pub struct KernelCache {
    map: RwLock<HashMap<(u32, u64, u64), KernelValue>>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, spec: &MeijerKernelSpec, y: f64) -> Result<KernelValue> {
        let key = (spec.m, spec.rho.to_bits(), y.to_bits());
        if let Some(v) = self.map.read().expect("kernel cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = g_kernel(spec, y)?;
        self.map.write().expect("kernel cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("kernel cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
