//! `L(1, chi)`, `L'(1, chi_D)` and the Laurent data of `zeta_K` at `s = 1`.

use num_complex::Complex64;

use crate::arith::{FieldContext, FundamentalDiscriminant};
use crate::characters::{gauss_sum, Character, KroneckerCharacter};
use crate::error::{Error, Result};
use crate::specfun::{sin_pi, EULER_GAMMA};

/// `B_{2k}` for k = 1..9.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

const EM_TERMS: usize = 8;
const SERIES_TOL: f64 = 1e-13;
const SERIES_MAX_N: u64 = 10_000_000;

/// `L(1, chi) = -(G(chi)/q) sum_{n<q} conj(chi(n)) log(2 sin(pi n / q))` for
/// even nonprincipal primitive `chi`.
pub fn l1_logsin<C: Character + ?Sized>(chi: &C) -> Result<Complex64> {
    if !chi.is_even() || chi.is_principal() {
        return Err(Error::InvalidArgument(
            "log-sine evaluation needs an even nonprincipal character".into(),
        ));
    }
    let q = chi.modulus();
    let s: Complex64 = (1..q)
        .map(|n| chi.value(n as i64).conj() * (2.0 * sin_pi(n as f64 / q as f64)).ln())
        .sum();
    Ok(-gauss_sum(chi) * s / q as f64)
}

/// `sum_{n=1}^{q-1} log(2 sin(pi n / q))`, which equals `log q`.
pub fn log_sine_sum(q: u64) -> f64 {
    (1..q).map(|n| (2.0 * sin_pi(n as f64 / q as f64)).ln()).sum()
}

/// Euler-Maclaurin evaluation of `sum_n chi(n) g(n)` for `g(u) = 1/u` or
/// `g(u) = log(u)/u`, summing whole periods `t q + a` up to `t < k` and
/// handling the rest with the block function `f(t) = sum_a chi(a) g(tq + a)`.
fn em_series<C: Character + ?Sized>(chi: &C, log_weight: bool) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::InvalidArgument("series needs a nonprincipal character".into()));
    }
    let q = chi.modulus();
    let qf = q as f64;
    let vals: Vec<Complex64> = (1..=q).map(|a| chi.value(a as i64)).collect();
    let g = |u: f64| if log_weight { u.ln() / u } else { 1.0 / u };
    let mut k: u64 = 16;
    loop {
        let mut head = Complex64::new(0.0, 0.0);
        for n in 1..k * q {
            let c = vals[((n - 1) % q) as usize];
            if c.re != 0.0 || c.im != 0.0 {
                head += c * g(n as f64);
            }
        }
        let mut integral = Complex64::new(0.0, 0.0);
        let mut f_k = Complex64::new(0.0, 0.0);
        let mut corr = vec![Complex64::new(0.0, 0.0); EM_TERMS + 1];
        for (a, &c) in vals.iter().enumerate() {
            let u = (k * q + a as u64 + 1) as f64;
            let lu = u.ln();
            integral += if log_weight { -c * lu * lu / (2.0 * qf) } else { -c * lu / qf };
            f_k += c * g(u);
            let mut harmonic = 0.0;
            for (j, slot) in corr.iter_mut().enumerate() {
                // derivative order r = 2j + 1
                let r = 2 * j + 1;
                if log_weight {
                    harmonic += if j == 0 { 1.0 } else { 1.0 / (r - 1) as f64 + 1.0 / r as f64 };
                }
                let p = qf.powi(r as i32) / u.powi(r as i32 + 1);
                *slot += c * if log_weight { p * (lu - harmonic) } else { p };
            }
        }
        let mut tail = integral + f_k * 0.5;
        for j in 0..EM_TERMS {
            tail += corr[j] * (BERNOULLI[j] / (2 * j + 2) as f64);
        }
        let next = (corr[EM_TERMS] * (BERNOULLI[EM_TERMS] / (2 * EM_TERMS + 2) as f64)).norm();
        if next <= SERIES_TOL {
            return Ok(head + tail);
        }
        k *= 2;
        if k * q > SERIES_MAX_N {
            return Err(Error::stalled(format!(
                "L-series tail bound {next:e} not met by N = {SERIES_MAX_N}"
            )));
        }
    }
}

/// `L(1, chi) = sum chi(n)/n` by the accelerated series.
pub fn l1_series<C: Character + ?Sized>(chi: &C) -> Result<Complex64> {
    em_series(chi, false)
}

/// `L'(1, chi) = -sum chi(n) log(n)/n` for any nonprincipal `chi`.
pub fn lprime1_series_complex<C: Character + ?Sized>(chi: &C) -> Result<Complex64> {
    Ok(-em_series(chi, true)?)
}

/// `L'(1, chi_D)` for a real Kronecker character.
pub fn lprime1_series(chi: &KroneckerCharacter) -> Result<f64> {
    Ok(lprime1_series_complex(chi)?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaurentSource {
    Series,
    ClassNumberFixture,
}

/// Residue and constant term of `zeta_K` at `s = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentData {
    pub residue: f64,
    pub const_term: f64,
    pub source: LaurentSource,
}

/// Laurent data of `zeta(s) L(s, chi_D)` from the series routes.
pub fn quadratic_laurent(d: FundamentalDiscriminant) -> Result<LaurentData> {
    let chi = KroneckerCharacter::new(d)?;
    if !chi.is_even() {
        return Err(Error::InvalidArgument(format!("need D > 0, got {}", d.value())));
    }
    let l1 = l1_series(&chi)?.re;
    let lp = lprime1_series(&chi)?;
    Ok(LaurentData {
        residue: l1,
        const_term: EULER_GAMMA * l1 + lp,
        source: LaurentSource::Series,
    })
}

pub fn laurent_data(ctx: &FieldContext) -> Result<LaurentData> {
    match ctx.disc {
        None => Ok(LaurentData {
            residue: 1.0,
            const_term: EULER_GAMMA,
            source: LaurentSource::Series,
        }),
        Some(d) => quadratic_laurent(d),
    }
}

/// Class number and fundamental unit `(a + b sqrt(D)) / 2` of a real
/// quadratic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassNumberFixture {
    pub disc: i64,
    pub class_number: u32,
    pub unit_a: f64,
    pub unit_b: f64,
}

impl ClassNumberFixture {
    pub fn unit(&self) -> f64 {
        0.5 * (self.unit_a + self.unit_b * (self.disc as f64).sqrt())
    }

    pub fn regulator(&self) -> f64 {
        self.unit().ln()
    }

    /// `2^{r1} Reg h / (w sqrt|D|)` with `r1 = 2`, `w = 2`.
    pub fn residue(&self) -> f64 {
        2.0 * self.class_number as f64 * self.regulator() / (self.disc as f64).sqrt()
    }
}

const FIXTURES: [ClassNumberFixture; 4] = [
    ClassNumberFixture { disc: 5, class_number: 1, unit_a: 1.0, unit_b: 1.0 },
    ClassNumberFixture { disc: 8, class_number: 1, unit_a: 2.0, unit_b: 1.0 },
    ClassNumberFixture { disc: 12, class_number: 1, unit_a: 4.0, unit_b: 1.0 },
    ClassNumberFixture { disc: 13, class_number: 1, unit_a: 3.0, unit_b: 1.0 },
];

pub fn class_number_fixture(disc: i64) -> Option<ClassNumberFixture> {
    FIXTURES.iter().copied().find(|f| f.disc == disc)
}

/// Laurent residue from the embedded fixture; the constant term still comes
/// from the series.
pub fn fixture_laurent(disc: i64) -> Result<LaurentData> {
    let fx = class_number_fixture(disc)
        .ok_or_else(|| Error::InvalidArgument(format!("no class-number fixture for D = {disc}")))?;
    let chi = KroneckerCharacter::new(FundamentalDiscriminant::new(disc)?)?;
    let residue = fx.residue();
    Ok(LaurentData {
        residue,
        const_term: EULER_GAMMA * residue + lprime1_series(&chi)?,
        source: LaurentSource::ClassNumberFixture,
    })
}
