//! Both sides of the Riesz-sum identities and the verification driver.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{corollary_weight, gcd, tables, FieldContext, FieldKind, FundamentalDiscriminant};
use crate::characters::{even_characters, gauss_sum, is_prime, Character, DirichletCharacter, KroneckerCharacter};
use crate::error::{Error, Result};
use crate::meijer::{g_kernel_ln, MeijerKernelSpec};
use crate::specfun::{cos_pi, digamma, gamma, sin_pi, voronoi_kernel_i, Accumulator, SumMode, EULER_GAMMA};

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    T3_1,
    T3_2,
    T3_3,
    T5_1,
    T5_2,
    T5_3,
    Corollary,
    Voronoi,
    Ramanujan,
}

impl CaseKind {
    pub const ALL: [CaseKind; 9] = [
        CaseKind::T3_1,
        CaseKind::T3_2,
        CaseKind::T3_3,
        CaseKind::T5_1,
        CaseKind::T5_2,
        CaseKind::T5_3,
        CaseKind::Corollary,
        CaseKind::Voronoi,
        CaseKind::Ramanujan,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CaseKind::T3_1 => "t3_1",
            CaseKind::T3_2 => "t3_2",
            CaseKind::T3_3 => "t3_3",
            CaseKind::T5_1 => "t5_1",
            CaseKind::T5_2 => "t5_2",
            CaseKind::T5_3 => "t5_3",
            CaseKind::Corollary => "corollary",
            CaseKind::Voronoi => "voronoi",
            CaseKind::Ramanujan => "ramanujan",
        }
    }

    /// Sums over `r | n` of `cos(2 pi r theta)`, expanded as a double series.
    pub fn is_cosine_sum(self) -> bool {
        matches!(self, CaseKind::T3_3 | CaseKind::T5_3 | CaseKind::Corollary | CaseKind::Ramanujan)
    }

    fn divides_by_gamma(self) -> bool {
        matches!(self, CaseKind::T3_1 | CaseKind::T3_2 | CaseKind::T5_1 | CaseKind::T5_2)
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseKind::ALL
            .into_iter()
            .find(|k| k.label() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown case '{s}'")))
    }
}

/// Rational `theta = h/q` with `q` prime and `0 < h < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Theta {
    pub h: u64,
    pub q: u64,
}

impl Theta {
    pub fn new(h: u64, q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidArgument(format!("q must be prime, got {q}")));
        }
        if h == 0 || h >= q {
            return Err(Error::InvalidArgument(format!("need 0 < h < q, got h = {h}, q = {q}")));
        }
        Ok(Theta { h, q })
    }

    pub fn value(self) -> f64 {
        self.h as f64 / self.q as f64
    }

    pub fn complement(self) -> Theta {
        Theta {
            h: self.q - self.h,
            q: self.q,
        }
    }

    /// `cos(2 pi r theta)`, reduced exactly modulo `q`.
    pub fn cos_multiple(self, r: u64) -> f64 {
        cos_pi(2.0 * ((r % self.q) * self.h % self.q) as f64 / self.q as f64)
    }

    /// `log(2 sin(pi theta))`.
    pub fn log_two_sin(self) -> f64 {
        (2.0 * sin_pi(self.value())).ln()
    }
}

/// One identity together with its parameters.
#[derive(Debug, Clone)]
pub struct RieszCase {
    pub kind: CaseKind,
    /// The field whose zeta function enters; for the `chi_D` families this is
    /// `Q(sqrt(D))`, whose Laurent data are `L(1, chi_D)` and
    /// `gamma L(1, chi_D) + L'(1, chi_D)`.
    pub field: FieldContext,
    pub disc: Option<FundamentalDiscriminant>,
    pub chi: Option<DirichletCharacter>,
    pub theta: Option<Theta>,
    pub rho: f64,
}

fn check_field_rho(field: &FieldContext, rho: f64) -> Result<()> {
    let floor = field.r1 as f64 / 2.0 - 1.0;
    if !(rho > floor) || !rho.is_finite() {
        return Err(Error::Hypothesis(format!(
            "rho must exceed r1/2 - 1 = {floor} for {}, got {rho}",
            field.label()
        )));
    }
    Ok(())
}

fn check_chi(chi: &DirichletCharacter) -> Result<()> {
    if chi.is_principal() || !chi.is_even() {
        return Err(Error::Hypothesis(format!(
            "chi must be a nonprincipal even character, got index {} mod {}",
            chi.index(),
            chi.modulus()
        )));
    }
    Ok(())
}

fn chi_d_field(d: i64, rho: f64) -> Result<(FieldContext, FundamentalDiscriminant)> {
    let disc = FundamentalDiscriminant::new(d)?;
    if d <= 1 {
        return Err(Error::Hypothesis(format!(
            "chi_D must be even and nonprincipal, which needs D > 1, got {d}"
        )));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Hypothesis(format!("rho must be positive for the chi_D identities, got {rho}")));
    }
    Ok((FieldContext::real_quadratic(d)?, disc))
}

fn check_coprime(q: u64, disc: FundamentalDiscriminant) -> Result<()> {
    if gcd(q, disc.abs()) != 1 {
        return Err(Error::Hypothesis(format!(
            "q = {q} must be coprime with D = {}",
            disc.value()
        )));
    }
    Ok(())
}

impl RieszCase {
    pub fn voronoi() -> Self {
        RieszCase {
            kind: CaseKind::Voronoi,
            field: FieldContext::rational(),
            disc: None,
            chi: None,
            theta: None,
            rho: 0.0,
        }
    }

    pub fn ramanujan(theta: Theta) -> Self {
        RieszCase {
            theta: Some(theta),
            kind: CaseKind::Ramanujan,
            ..Self::voronoi()
        }
    }

    pub fn t3_1(field: FieldContext, chi: DirichletCharacter, rho: f64) -> Result<Self> {
        check_field_rho(&field, rho)?;
        check_chi(&chi)?;
        Ok(RieszCase {
            kind: CaseKind::T3_1,
            field,
            disc: None,
            chi: Some(chi),
            theta: None,
            rho,
        })
    }

    pub fn t3_2(field: FieldContext, rho: f64) -> Result<Self> {
        check_field_rho(&field, rho)?;
        Ok(RieszCase {
            kind: CaseKind::T3_2,
            field,
            disc: None,
            chi: None,
            theta: None,
            rho,
        })
    }

    pub fn t3_3(field: FieldContext, theta: Theta, rho: f64) -> Result<Self> {
        check_field_rho(&field, rho)?;
        Ok(RieszCase {
            kind: CaseKind::T3_3,
            field,
            disc: None,
            chi: None,
            theta: Some(theta),
            rho,
        })
    }

    pub fn t5_1(d: i64, chi: DirichletCharacter, rho: f64) -> Result<Self> {
        let (field, disc) = chi_d_field(d, rho)?;
        check_chi(&chi)?;
        check_coprime(chi.modulus(), disc)?;
        Ok(RieszCase {
            kind: CaseKind::T5_1,
            field,
            disc: Some(disc),
            chi: Some(chi),
            theta: None,
            rho,
        })
    }

    pub fn t5_2(d: i64, rho: f64) -> Result<Self> {
        let (field, disc) = chi_d_field(d, rho)?;
        Ok(RieszCase {
            kind: CaseKind::T5_2,
            field,
            disc: Some(disc),
            chi: None,
            theta: None,
            rho,
        })
    }

    pub fn t5_3(d: i64, theta: Theta, rho: f64) -> Result<Self> {
        let (field, disc) = chi_d_field(d, rho)?;
        check_coprime(theta.q, disc)?;
        Ok(RieszCase {
            kind: CaseKind::T5_3,
            field,
            disc: Some(disc),
            chi: None,
            theta: Some(theta),
            rho,
        })
    }

    pub fn corollary(d: i64, theta: Theta, rho: f64) -> Result<Self> {
        Ok(RieszCase {
            kind: CaseKind::Corollary,
            ..Self::t5_3(d, theta, rho)?
        })
    }

    /// The same identity at `1 - theta`.
    pub fn with_complement_theta(&self) -> Self {
        RieszCase {
            theta: self.theta.map(Theta::complement),
            ..self.clone()
        }
    }

    /// Order `m` of the G-kernel.
    pub fn kernel_order(&self) -> u32 {
        match self.kind {
            CaseKind::T5_1 | CaseKind::T5_2 | CaseKind::T5_3 | CaseKind::Corollary => 3,
            CaseKind::Voronoi | CaseKind::Ramanujan => 2,
            _ => self.field.kernel_order(),
        }
    }

    fn chi(&self) -> Result<&DirichletCharacter> {
        self.chi
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("{} needs a character", self.kind)))
    }

    fn theta(&self) -> Result<Theta> {
        self.theta
            .ok_or_else(|| Error::InvalidArgument(format!("{} needs theta = h/q", self.kind)))
    }

    fn disc(&self) -> Result<FundamentalDiscriminant> {
        self.disc
            .ok_or_else(|| Error::InvalidArgument(format!("{} needs a discriminant", self.kind)))
    }

    fn chi_d(&self) -> Result<KroneckerCharacter> {
        KroneckerCharacter::new(self.disc()?)
    }

    /// Scale applied to both sides: `w_D` for the representation-count
    /// identity, 1 otherwise.
    pub fn weight(&self) -> (f64, bool) {
        match (self.kind, self.disc) {
            (CaseKind::Corollary, Some(d)) => {
                let (w, tension) = corollary_weight(d);
                (w as f64, tension)
            }
            _ => (1.0, false),
        }
    }

    /// Base coefficients `a(n)` on `0..=n_max`: `f_K` for the field
    /// identities, `d_{chi_D}` for the `chi_D` ones.
    pub fn base_table(&self, n_max: usize) -> Result<Vec<i64>> {
        match self.kind {
            CaseKind::T5_1 | CaseKind::T5_2 | CaseKind::T5_3 | CaseKind::Corollary => {
                Ok(tables::d_kronecker_table(self.disc()?, n_max))
            }
            _ => Ok(tables::f_k(&self.field, n_max)),
        }
    }

    /// `log|Delta|`-type constant `A` in the kernel argument `A / (pi^{2m} (nu x)^2)`.
    fn kernel_disc(&self) -> f64 {
        match self.disc {
            Some(d) => d.abs() as f64,
            None => self.field.abs_disc() as f64,
        }
    }

    fn uses_bessel_kernel(&self) -> bool {
        matches!(self.kind, CaseKind::Voronoi | CaseKind::Ramanujan)
    }
}

fn half_term_weight(rho: f64, x: f64, n: f64) -> f64 {
    if rho == 0.0 && n == x {
        0.5
    } else {
        1.0
    }
}

fn riesz_weight(rho: f64, x: f64, n: f64) -> f64 {
    if rho == 0.0 {
        half_term_weight(rho, x, n)
    } else {
        (x * x - n * n).powf(rho)
    }
}

fn finite_x(x: f64) -> Result<usize> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be positive and finite, got {x}")));
    }
    Ok(x.floor() as usize)
}

/// Arithmetic weights `a(n)`, `n <= n_max`, multiplying `(x^2 - n^2)^rho` on
/// the left-hand side (before the `1/Gamma(rho + 1)` and `w_D` factors).
pub fn lhs_coefficients(case: &RieszCase, n_max: usize) -> Result<Vec<Complex64>> {
    let base = case.base_table(n_max)?;
    let real = |v: Vec<i64>| v.into_iter().map(|c| Complex64::new(c as f64, 0.0)).collect();
    match case.kind {
        CaseKind::T3_2 | CaseKind::T5_2 | CaseKind::Voronoi => Ok(real(tables::sum_over_divisors(&base))),
        CaseKind::T3_1 | CaseKind::T5_1 => Ok(tables::twist(&base, case.chi()?)),
        CaseKind::T3_3 | CaseKind::T5_3 | CaseKind::Corollary | CaseKind::Ramanujan => {
            let theta = case.theta()?;
            let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
            for r in 1..=n_max {
                let c = theta.cos_multiple(r as u64);
                let mut k = 1;
                while r * k <= n_max {
                    if base[k] != 0 {
                        out[r * k] += c * base[k] as f64;
                    }
                    k += 1;
                }
            }
            Ok(out)
        }
    }
}

/// Left-hand side as an exact finite sum (complex for the character twists).
pub fn lhs_riesz(case: &RieszCase, x: f64) -> Result<Complex64> {
    let n_max = finite_x(x)?;
    let rho = case.rho;
    let coeff = lhs_coefficients(case, n_max)?;
    let mut acc = Accumulator::new(SumMode::Compensated);
    for (n, c) in coeff.iter().enumerate().skip(1) {
        acc.add(c * riesz_weight(rho, x, n as f64));
    }
    let mut v = acc.value();
    if case.kind.divides_by_gamma() {
        v /= gamma(rho + 1.0)?;
    }
    Ok(v * case.weight().0)
}

/// `sum_{n<q} conj(chi(n)) log(2 sin(pi n / q))`.
fn log_sine_twist(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus();
    (1..q)
        .map(|n| chi.value(n as i64).conj() * (2.0 * sin_pi(n as f64 / q as f64)).ln())
        .sum()
}

/// Closed-form main term.
pub fn rhs_main(case: &RieszCase, x: f64) -> Result<Complex64> {
    finite_x(x)?;
    let rho = case.rho;
    let res = case.field.gamma_minus1;
    let g_rho1 = gamma(rho + 1.0)?;
    let g_rho32 = gamma(rho + 1.5)?;
    let sqrt_pi = PI.sqrt();
    let power = x.powf(1.0 + 2.0 * rho);
    let r1_is_one = case.field.kind == FieldKind::Rational;
    let v = match case.kind {
        CaseKind::Voronoi => Complex64::new(x * (x.ln() + 2.0 * EULER_GAMMA - 1.0) + 0.25, 0.0),
        CaseKind::Ramanujan => Complex64::new(0.25 - x * case.theta()?.log_two_sin(), 0.0),
        CaseKind::T3_1 | CaseKind::T5_1 => {
            let chi = case.chi()?;
            -gauss_sum(chi) * sqrt_pi * res * power / (2.0 * chi.modulus() as f64 * g_rho32) * log_sine_twist(chi)
        }
        CaseKind::T3_2 => {
            let brace = case.field.gamma_0 + res * EULER_GAMMA + 0.5 * res * digamma(0.5)?
                - 0.5 * res * digamma(rho + 1.5)?
                + res * x.ln();
            let mut v = sqrt_pi * power / (2.0 * g_rho32) * brace;
            if r1_is_one {
                v += x.powf(2.0 * rho) / (4.0 * g_rho1);
            }
            Complex64::new(v, 0.0)
        }
        CaseKind::T5_2 => {
            let l1 = res;
            let lp = case.field.gamma_0 - EULER_GAMMA * l1;
            let brace = 2.0 * lp / l1 + digamma(0.5)? - digamma(rho + 1.5)? + 2.0 * x.ln() + 4.0 * EULER_GAMMA;
            Complex64::new(sqrt_pi * power * l1 / (4.0 * g_rho32) * brace, 0.0)
        }
        CaseKind::T3_3 | CaseKind::T5_3 | CaseKind::Corollary => {
            let theta = case.theta()?;
            let mut v = -g_rho1 * sqrt_pi * res * power / (2.0 * g_rho32) * theta.log_two_sin();
            if case.kind == CaseKind::T3_3 && r1_is_one {
                v += x.powf(2.0 * rho) / 4.0;
            }
            Complex64::new(v * case.weight().0, 0.0)
        }
    };
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummationMode {
    /// Terms weighted by a smooth window in the kernel frequency.
    Smooth,
    /// Rectangular caps on the displayed indices.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummationOrder {
    /// Inner `n` ascending, outer `m` ascending.
    InnerNOuterM,
    InnerMOuterN,
}

/// How the right-hand series is cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub mode: SummationMode,
    pub order: SummationOrder,
    /// Cap on the outer index `m` of double series (raw mode).
    pub max_m: u64,
    /// Cap on `n` (raw mode), or the hard cap on the frequency `nu` (smooth).
    pub max_n: u64,
    /// First cap tried by the adaptive driver in smooth mode.
    pub initial_cap: u64,
    /// Number of partial sums reported.
    pub levels: usize,
    /// Accepted `est_abs_error / max(1, |G|)` per kernel value.
    pub kernel_tol: f64,
    /// Allowed change between the last two partials at the hard cap.
    pub series_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            mode: SummationMode::Smooth,
            order: SummationOrder::InnerNOuterM,
            max_m: 1 << 21,
            max_n: 1 << 21,
            initial_cap: 256,
            levels: 6,
            kernel_tol: 1e-10,
            series_tol: 1e-3,
        }
    }
}

impl TruncationPolicy {
    pub fn raw(max_m: u64, max_n: u64) -> Self {
        TruncationPolicy {
            mode: SummationMode::Raw,
            max_m,
            max_n,
            ..Self::default()
        }
    }

    pub fn smooth(cap: u64) -> Self {
        TruncationPolicy {
            max_n: cap,
            ..Self::default()
        }
    }
}

/// Partial sum of the right-hand series at one truncation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPartial {
    pub level: f64,
    pub value: Complex64,
}

/// Output of [`rhs_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPartials {
    pub partials: Vec<SeriesPartial>,
    /// Accumulated `|coefficient| * kernel error` over the terms used.
    pub kernel_error: f64,
    pub tail_estimate: f64,
}

impl SeriesPartials {
    pub fn last(&self) -> Complex64 {
        self.partials.last().map_or(Complex64::new(0.0, 0.0), |p| p.value)
    }
}

/// `exp(-1/t)`-free smooth cutoff: 1 at 0, 0 at 1, all derivatives vanishing
/// at both ends.
pub fn window(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        0.5 * libm::erfc(3.0 * (u - 0.5) / (u * (1.0 - u)).sqrt())
    }
}

/// Flattened series `sum_j pref * c_j / j * G(y_j)` with
/// `y_j = A / (pi^{2m} (j x / den)^2)`; `nu_j = j / den` is the frequency.
struct SeriesPlan {
    m: u32,
    den: f64,
    ln_y0: f64,
    pref: Complex64,
    spec: Option<MeijerKernelSpec>,
}

fn plan(case: &RieszCase, x: f64, kernel_tol: f64) -> Result<SeriesPlan> {
    let m = case.kernel_order();
    let rho = case.rho;
    let a = case.kernel_disc();
    let x2rho = x.powf(2.0 * rho);
    let pi_m2 = PI.powf(m as f64 / 2.0);
    let (den, pref) = match case.kind {
        CaseKind::Voronoi => (1.0, Complex64::new(1.0 / PI, 0.0)),
        CaseKind::Ramanujan => {
            let q = case.theta()?.q as f64;
            (q, Complex64::new(q / (2.0 * PI), 0.0))
        }
        CaseKind::T3_2 => (1.0, Complex64::new(a.sqrt() * x2rho / pi_m2, 0.0)),
        CaseKind::T5_2 => (1.0, gauss_sum(&case.chi_d()?) * x2rho / pi_m2),
        CaseKind::T3_1 => {
            let chi = case.chi()?;
            (chi.modulus() as f64, gauss_sum(chi) * a.sqrt() * x2rho / pi_m2)
        }
        CaseKind::T5_1 => {
            let chi = case.chi()?;
            (chi.modulus() as f64, gauss_sum(chi) * gauss_sum(&case.chi_d()?) * x2rho / pi_m2)
        }
        CaseKind::T3_3 => {
            let q = case.theta()?.q as f64;
            (q, Complex64::new(q * gamma(rho + 1.0)? * a.sqrt() * x2rho / (2.0 * pi_m2), 0.0))
        }
        CaseKind::T5_3 | CaseKind::Corollary => {
            let q = case.theta()?.q as f64;
            let g = gauss_sum(&case.chi_d()?);
            (q, g * q * gamma(rho + 1.0)? * x2rho / (2.0 * pi_m2) * case.weight().0)
        }
    };
    let spec = if case.uses_bessel_kernel() {
        None
    } else {
        Some(MeijerKernelSpec::new(m, rho)?.with_tol(kernel_tol))
    };
    Ok(SeriesPlan {
        m,
        den,
        ln_y0: a.ln() * 2.0 - 2.0 * m as f64 * PI.ln() - 2.0 * x.ln() + 2.0 * den.ln(),
        pref,
        spec,
    })
}

impl SeriesPlan {
    /// `(G(y_j), error estimate)`.
    fn kernel(&self, j: u64) -> Result<(f64, f64)> {
        let ln_y = self.ln_y0 - 2.0 * (j as f64).ln();
        match &self.spec {
            Some(spec) => {
                let v = g_kernel_ln(spec, ln_y)?;
                Ok((v.value, v.est_abs_error))
            }
            None => {
                let r = (-0.25 * ln_y).exp();
                let v = r * voronoi_kernel_i(1.0, 4.0 * r)?;
                Ok((v, 1e-12 * r.max(1.0)))
            }
        }
    }
}

/// Grouped coefficients `c_j` on `0..=j_max`.
fn coefficients(case: &RieszCase, j_max: usize) -> Result<Vec<Complex64>> {
    let real = |v: Vec<i64>| v.into_iter().map(|c| Complex64::new(c as f64, 0.0)).collect();
    match case.kind {
        CaseKind::T3_2 | CaseKind::T5_2 | CaseKind::Voronoi => {
            Ok(real(tables::sum_over_divisors(&case.base_table(j_max)?)))
        }
        CaseKind::T3_1 | CaseKind::T5_1 => {
            let conj = case.chi()?.conj();
            Ok(tables::twist(&case.base_table(j_max)?, &conj))
        }
        CaseKind::T3_3 | CaseKind::T5_3 | CaseKind::Corollary | CaseKind::Ramanujan => {
            // j = m (q n + h') for h' in {h, q - h}; c_j = sum of a(m) over such m.
            let theta = case.theta()?;
            let base = case.base_table(j_max)?;
            let mut c = vec![0i64; j_max + 1];
            for m in 1..=j_max {
                if base[m] == 0 {
                    continue;
                }
                for hp in [theta.h, theta.q - theta.h] {
                    let mut k = hp as usize;
                    while m * k <= j_max {
                        c[m * k] += base[m];
                        k += theta.q as usize;
                    }
                }
            }
            Ok(real(c))
        }
    }
}

/// Kernel values and coefficients up to a growing index.
struct SeriesEngine<'a> {
    case: &'a RieszCase,
    plan: SeriesPlan,
    coeffs: Vec<Complex64>,
    kernels: Vec<(f64, f64)>,
}

impl<'a> SeriesEngine<'a> {
    fn new(case: &'a RieszCase, x: f64, trunc: &TruncationPolicy) -> Result<Self> {
        Ok(SeriesEngine {
            case,
            plan: plan(case, x, trunc.kernel_tol)?,
            coeffs: vec![Complex64::new(0.0, 0.0)],
            kernels: vec![(0.0, 0.0)],
        })
    }

    fn extend(&mut self, j_max: usize) -> Result<()> {
        let have = self.kernels.len() - 1;
        if j_max <= have {
            return Ok(());
        }
        self.coeffs = coefficients(self.case, j_max)?;
        let plan = &self.plan;
        let coeffs = &self.coeffs;
        let fresh: Vec<(f64, f64)> = (have + 1..=j_max)
            .into_par_iter()
            .map(|j| {
                if coeffs[j].norm_sqr() == 0.0 {
                    Ok((0.0, 0.0))
                } else {
                    plan.kernel(j as u64)
                }
            })
            .collect::<Result<_>>()?;
        self.kernels.extend(fresh);
        Ok(())
    }

    fn term(&self, j: usize) -> (Complex64, f64) {
        let c = self.coeffs[j] * self.plan.pref / j as f64;
        let (g, e) = self.kernels[j];
        (c * g, c.norm() * e)
    }

    /// Windowed partial sum at frequency cap `level`.
    fn smooth(&self, level: f64) -> (Complex64, f64) {
        let j_end = ((level * self.plan.den).ceil() as usize).min(self.kernels.len() - 1);
        let inv_m = 1.0 / self.plan.m as f64;
        let mut acc = Accumulator::new(SumMode::Compensated);
        let mut err = 0.0;
        for j in 1..=j_end {
            if self.coeffs[j].norm_sqr() == 0.0 {
                continue;
            }
            let w = window((j as f64 / self.plan.den / level).powf(inv_m));
            if w == 0.0 {
                continue;
            }
            let (t, e) = self.term(j);
            acc.add(t * w);
            err += e * w;
        }
        (acc.value(), err)
    }
}

fn smooth_partials(engine: &mut SeriesEngine, cap: u64, levels: usize) -> Result<SeriesPartials> {
    engine.extend((cap as f64 * engine.plan.den).ceil() as usize)?;
    let levels = levels.max(2);
    let mut partials = Vec::with_capacity(levels);
    let mut kernel_error = 0.0;
    for k in (0..levels).rev() {
        let level = cap as f64 / (1u64 << k) as f64;
        let (v, e) = engine.smooth(level);
        partials.push(SeriesPartial { level, value: v });
        kernel_error = e;
    }
    let n = partials.len();
    let delta = (partials[n - 1].value - partials[n - 2].value).norm();
    Ok(SeriesPartials {
        partials,
        kernel_error,
        tail_estimate: 2.0 * delta + kernel_error,
    })
}

fn raw_partials(case: &RieszCase, x: f64, trunc: &TruncationPolicy) -> Result<SeriesPartials> {
    let plan = plan(case, x, trunc.kernel_tol)?;
    let levels = trunc.levels.max(2) as u32;
    let mut partials = Vec::new();
    let mut acc = Accumulator::new(SumMode::Compensated);
    let mut kernel_error = 0.0;
    if !case.kind.is_cosine_sum() {
        let n_max = trunc.max_n as usize;
        let coeffs = coefficients(case, n_max)?;
        let kernels: Vec<(f64, f64)> = (1..=n_max)
            .into_par_iter()
            .map(|j| if coeffs[j].norm_sqr() == 0.0 { Ok((0.0, 0.0)) } else { plan.kernel(j as u64) })
            .collect::<Result<_>>()?;
        let marks = level_marks(trunc.max_n, levels);
        for j in 1..=n_max {
            let c = coeffs[j] * plan.pref / j as f64;
            let (g, e) = kernels[j - 1];
            acc.add(c * g);
            kernel_error += c.norm() * e;
            if marks.contains(&(j as u64)) {
                partials.push(SeriesPartial { level: j as f64, value: acc.value() });
            }
        }
    } else {
        let theta = case.theta()?;
        let (m_max, n_max) = (trunc.max_m, trunc.max_n);
        let base = case.base_table(m_max as usize)?;
        let q = theta.q;
        let index = |m: u64, n: u64, hp: u64| m * (q * n + hp);
        let mut js: Vec<u64> = Vec::new();
        for m in 1..=m_max {
            if base[m as usize] != 0 {
                for n in 0..=n_max {
                    js.push(index(m, n, theta.h));
                    js.push(index(m, n, q - theta.h));
                }
            }
        }
        js.sort_unstable();
        js.dedup();
        let values: Vec<(f64, f64)> = js.par_iter().map(|&j| plan.kernel(j)).collect::<Result<_>>()?;
        let lookup = |j: u64| values[js.binary_search(&j).expect("kernel index tabulated")];
        let mut add = |m: u64, n: u64, acc: &mut Accumulator| {
            let a = base[m as usize];
            if a == 0 {
                return;
            }
            for hp in [theta.h, q - theta.h] {
                let j = index(m, n, hp);
                let c = plan.pref * a as f64 / j as f64;
                let (g, e) = lookup(j);
                acc.add(c * g);
                kernel_error += c.norm() * e;
            }
        };
        match trunc.order {
            SummationOrder::InnerNOuterM => {
                let marks = level_marks(m_max, levels);
                for m in 1..=m_max {
                    for n in 0..=n_max {
                        add(m, n, &mut acc);
                    }
                    if marks.contains(&m) {
                        partials.push(SeriesPartial { level: m as f64, value: acc.value() });
                    }
                }
            }
            SummationOrder::InnerMOuterN => {
                let marks = level_marks(n_max + 1, levels);
                for n in 0..=n_max {
                    for m in 1..=m_max {
                        add(m, n, &mut acc);
                    }
                    if marks.contains(&(n + 1)) {
                        partials.push(SeriesPartial { level: (n + 1) as f64, value: acc.value() });
                    }
                }
            }
        }
    }
    let n = partials.len();
    let delta = if n >= 2 { (partials[n - 1].value - partials[n - 2].value).norm() } else { f64::INFINITY };
    Ok(SeriesPartials {
        partials,
        kernel_error,
        tail_estimate: 2.0 * delta + kernel_error,
    })
}

/// `cap, cap/2, ..., cap/2^{levels-1}` (at least 1), ascending.
fn level_marks(cap: u64, levels: u32) -> Vec<u64> {
    let mut v: Vec<u64> = (0..levels).map(|k| (cap >> k).max(1)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Partial sums of the right-hand series at the caps in `trunc`.
pub fn rhs_series(case: &RieszCase, x: f64, trunc: &TruncationPolicy) -> Result<SeriesPartials> {
    finite_x(x)?;
    let out = match trunc.mode {
        SummationMode::Smooth => {
            let mut engine = SeriesEngine::new(case, x, trunc)?;
            smooth_partials(&mut engine, trunc.max_n, trunc.levels)?
        }
        SummationMode::Raw => raw_partials(case, x, trunc)?,
    };
    let n = out.partials.len();
    if n >= 2 && (out.partials[n - 1].value - out.partials[n - 2].value).norm() > trunc.series_tol {
        return Err(Error::stalled(format!(
            "successive partials differ by {:e} at the cap",
            (out.partials[n - 1].value - out.partials[n - 2].value).norm()
        )));
    }
    Ok(out)
}

/// Result of one verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub case: CaseKind,
    pub x: f64,
    pub rho: f64,
    pub lhs: f64,
    pub lhs_im: f64,
    pub rhs_main: f64,
    pub rhs_main_im: f64,
    /// `(level, value, value_im)` ascending in level.
    pub rhs_series_partials: Vec<(f64, f64, f64)>,
    pub residual: f64,
    pub tail_estimate: f64,
    pub kernel_error: f64,
    pub converged: bool,
    pub mode: SummationMode,
    pub order: SummationOrder,
    /// `w_D` applied to both sides (1 unless representation counts).
    pub weight: f64,
    /// Set when `w_D` is used with `D > 0`, outside its tabulated range.
    pub d_sign_tension: bool,
    pub wall_clock_s: f64,
}

fn fmt_num(v: f64) -> Value {
    Value::String(format!("{v:.16e}"))
}

impl VerificationReport {
    fn build(
        case: &RieszCase,
        x: f64,
        lhs: Complex64,
        main: Complex64,
        series: &SeriesPartials,
        tol: f64,
        trunc: &TruncationPolicy,
        started: Instant,
    ) -> Self {
        let residual = (lhs - main - series.last()).norm();
        let (weight, tension) = case.weight();
        VerificationReport {
            case: case.kind,
            x,
            rho: case.rho,
            lhs: lhs.re,
            lhs_im: lhs.im,
            rhs_main: main.re,
            rhs_main_im: main.im,
            rhs_series_partials: series.partials.iter().map(|p| (p.level, p.value.re, p.value.im)).collect(),
            residual,
            tail_estimate: series.tail_estimate,
            kernel_error: series.kernel_error,
            converged: residual <= tol + series.tail_estimate,
            mode: trunc.mode,
            order: trunc.order,
            weight,
            d_sign_tension: tension,
            wall_clock_s: started.elapsed().as_secs_f64(),
        }
    }

    /// Residual `|lhs - main - partial|` at every reported level.
    pub fn residuals(&self) -> Vec<f64> {
        let lhs = Complex64::new(self.lhs, self.lhs_im);
        let main = Complex64::new(self.rhs_main, self.rhs_main_im);
        self.rhs_series_partials
            .iter()
            .map(|&(_, re, im)| (lhs - main - Complex64::new(re, im)).norm())
            .collect()
    }

    pub fn last_partial(&self) -> Complex64 {
        self.rhs_series_partials
            .last()
            .map_or(Complex64::new(0.0, 0.0), |&(_, re, im)| Complex64::new(re, im))
    }

    /// JSON with every number as a 17-significant-digit string; the
    /// wall-clock time is included only on request so repeated runs match.
    pub fn to_json(&self, with_timing: bool) -> Value {
        let partials: Vec<Value> = self
            .rhs_series_partials
            .iter()
            .map(|&(l, re, im)| json!({"level": fmt_num(l), "value": fmt_num(re), "value_im": fmt_num(im)}))
            .collect();
        let mut v = json!({
            "case": self.case.label(),
            "x": fmt_num(self.x),
            "rho": fmt_num(self.rho),
            "lhs": fmt_num(self.lhs),
            "lhs_im": fmt_num(self.lhs_im),
            "rhs_main": fmt_num(self.rhs_main),
            "rhs_main_im": fmt_num(self.rhs_main_im),
            "rhs_series_partials": partials,
            "residual": fmt_num(self.residual),
            "tail_estimate": fmt_num(self.tail_estimate),
            "kernel_error": fmt_num(self.kernel_error),
            "converged": self.converged,
            "mode": format!("{:?}", self.mode).to_lowercase(),
            "order": match self.order {
                SummationOrder::InnerNOuterM => "inner_n_outer_m",
                SummationOrder::InnerMOuterN => "inner_m_outer_n",
            },
            "weight": fmt_num(self.weight),
            "d_sign_tension": self.d_sign_tension,
        });
        if with_timing {
            v["wall_clock_s"] = fmt_num(self.wall_clock_s);
        }
        v
    }
}

/// Evaluates both sides; in smooth mode the cap doubles from
/// `trunc.initial_cap` until the tail estimate falls below `tol / 2` or the
/// hard cap `trunc.max_n` is reached.
pub fn verify(case: &RieszCase, x: f64, trunc: &TruncationPolicy, tol: f64) -> Result<VerificationReport> {
    let started = Instant::now();
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let lhs = lhs_riesz(case, x)?;
    let main = rhs_main(case, x)?;
    let series = match trunc.mode {
        SummationMode::Raw => raw_partials(case, x, trunc)?,
        SummationMode::Smooth => {
            let mut engine = SeriesEngine::new(case, x, trunc)?;
            let mut cap = trunc.initial_cap.clamp(2, trunc.max_n.max(2));
            loop {
                let s = smooth_partials(&mut engine, cap, trunc.levels)?;
                if s.tail_estimate <= 0.5 * tol {
                    break s;
                }
                if cap.saturating_mul(2) > trunc.max_n {
                    let n = s.partials.len();
                    let delta = (s.partials[n - 1].value - s.partials[n - 2].value).norm();
                    if delta > tol {
                        let best = VerificationReport::build(case, x, lhs, main, &s, tol, trunc, started);
                        return Err(Error::NonConvergence {
                            reason: format!(
                                "{} at x = {x}: partials still move by {delta:e} at cap {cap}",
                                case.kind
                            ),
                            best: Some(Box::new(best)),
                        });
                    }
                    break s;
                }
                cap *= 2;
            }
        }
    };
    Ok(VerificationReport::build(case, x, lhs, main, &series, tol, trunc, started))
}

/// The representation-count identity: the `chi_D` cosine identity scaled by
/// `w_D`, with the sign tension flagged for `D > 0`.
pub fn corollary_rd(
    d: i64,
    theta: Theta,
    rho: f64,
    x: f64,
    trunc: &TruncationPolicy,
    tol: f64,
) -> Result<VerificationReport> {
    verify(&RieszCase::corollary(d, theta, rho)?, x, trunc, tol)
}

/// The three pieces of the character decomposition of the cosine sum:
/// `q^{2rho+1}/phi(q) * S(x/q) - S(x)/phi(q) + (1/phi(q)) sum_{chi != chi_0
/// even} chi(h) G(conj chi) S_chi(x)` where `S` sums `(x^2 - n^2)^rho` against
/// `D_K` (or `script D_D`) and `S_chi` against its twist by `chi`.
pub fn cosine_decomposition(case: &RieszCase, x: f64) -> Result<[Complex64; 3]> {
    if !matches!(case.kind, CaseKind::T3_3 | CaseKind::T5_3) {
        return Err(Error::InvalidArgument(format!("no character decomposition for {}", case.kind)));
    }
    let theta = case.theta()?;
    let n_max = finite_x(x)?.max(1);
    let q = theta.q;
    let phi = (q - 1) as f64;
    let rho = case.rho;
    let base = case.base_table(n_max)?;
    let summed = tables::sum_over_divisors(&base);
    let riesz = |y: f64, coeff: &dyn Fn(usize) -> Complex64| -> Complex64 {
        let mut acc = Accumulator::new(SumMode::Compensated);
        for n in 1..=(y.floor() as usize) {
            acc.add(coeff(n) * riesz_weight(rho, y, n as f64));
        }
        acc.value()
    };
    let real = |n: usize| Complex64::new(summed[n] as f64, 0.0);
    let first = riesz(x / q as f64, &real) * ((q as f64).powf(2.0 * rho + 1.0) / phi);
    let second = -riesz(x, &real) / phi;
    let mut third = Complex64::new(0.0, 0.0);
    for chi in even_characters(q)?.into_iter().filter(|c| !c.is_principal()) {
        let twisted = tables::twist(&base, &chi);
        let s = riesz(x, &|n| twisted[n]);
        third += chi.value(theta.h as i64) * gauss_sum(&chi.conj()) * s;
    }
    Ok([first, second, third / phi])
}
