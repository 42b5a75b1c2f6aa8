//! Error terms `LHS - main` over x-grids and their growth exponents.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::identities::{lhs_riesz, rhs_main, CaseKind, RieszCase};

/// Added to the theoretical exponent when normalizing.
pub const MARGIN: f64 = 0.1;
/// Errors below this magnitude are treated as zero crossings.
pub const VANISHING: f64 = 1e-12;
pub const MIN_GRID: usize = 8;

fn check_kind(case: &RieszCase) -> Result<()> {
    match case.kind {
        CaseKind::T3_3 | CaseKind::T5_3 => Ok(()),
        k => Err(Error::InvalidArgument(format!(
            "error-term study covers t3_3 and t5_3, got {k}"
        ))),
    }
}

/// `LHS(x) - main(x)`.
pub fn error_term(case: &RieszCase, x: f64) -> Result<f64> {
    check_kind(case)?;
    Ok((lhs_riesz(case, x)? - rhs_main(case, x)?).re)
}

/// Predicted growth exponent, or `None` when `rho` sits between the
/// identity's range and the range of the bound.
pub fn theory_exponent(case: &RieszCase) -> Result<Option<f64>> {
    check_kind(case)?;
    let rho = case.rho;
    Ok(match case.kind {
        CaseKind::T3_3 => {
            let r1 = case.field.r1 as f64;
            (rho > r1 / 2.0).then(|| 2.0 * rho + 0.5 - (2.0 * rho + 1.0) / (2.0 * (r1 + 1.0)))
        }
        _ => (rho > 1.0).then(|| (5.0 * rho + 1.0) / 3.0),
    })
}

/// `points` values geometric in `[lo, hi]`, each floored and shifted by 1/2.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(lo > 0.0) || !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lo < hi and at least 2 points, got [{lo}, {hi}] with {points}"
        )));
    }
    let ratio = hi / lo;
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (lo * ratio.powf(i as f64 / (points - 1) as f64)).floor() + 0.5)
        .collect();
    grid.dedup();
    Ok(grid)
}

/// 24 points on `[20, 200]`.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(20.0, 200.0, 24).expect("valid constants")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub grid: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log|error|` against `log x`, skipping
    /// vanishing errors.
    pub fitted_slope: f64,
    pub theory_slope: Option<f64>,
    /// `sup |error| / x^(theory + MARGIN)`.
    pub normalized_sup: Option<f64>,
}

impl ExponentFit {
    /// `|error| / x^(theory + MARGIN)` per grid point.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let t = self.theory_slope? + MARGIN;
        Some(self.grid.iter().zip(&self.errors).map(|(x, e)| e.abs() / x.powf(t)).collect())
    }

    /// Running maximum of [`Self::normalized`].
    pub fn running_sup(&self) -> Option<Vec<f64>> {
        let mut best = f64::NEG_INFINITY;
        Some(
            self.normalized()?
                .into_iter()
                .map(|v| {
                    best = best.max(v);
                    best
                })
                .collect(),
        )
    }

    /// Whether the running supremum stays flat over the top half of the grid.
    pub fn sup_settled(&self) -> Option<bool> {
        let run = self.running_sup()?;
        let half = run.len() / 2;
        let all_finite = run.iter().all(|v| v.is_finite());
        Some(all_finite && run[half..].windows(2).all(|w| w[1] <= w[0]))
    }

    pub fn to_json(&self) -> Value {
        let s = |v: f64| Value::String(format!("{v:.16e}"));
        json!({
            "fitted_slope": s(self.fitted_slope),
            "theory_slope": self.theory_slope.map(s),
            "normalized_sup": self.normalized_sup.map(s),
            "points": self.grid.len(),
        })
    }

    pub fn to_csv(&self) -> String {
        let norm = self.normalized();
        let mut out = String::from("x,error,normalized\n");
        for (i, (x, e)) in self.grid.iter().zip(&self.errors).enumerate() {
            let n = norm.as_ref().map_or(String::new(), |v| format!("{:.16e}", v[i]));
            out.push_str(&format!("{x:.16e},{e:.16e},{n}\n"));
        }
        out
    }
}

/// Fits precomputed errors.
pub fn fit_errors(grid: Vec<f64>, errors: Vec<f64>, theory_slope: Option<f64>) -> Result<ExponentFit> {
    if grid.len() < MIN_GRID || grid.len() != errors.len() {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_GRID} grid points with one error each, got {} and {}",
            grid.len(),
            errors.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] > 0.0) {
        return Err(Error::InvalidArgument("grid must be positive and strictly increasing".into()));
    }
    let kept: Vec<(f64, f64)> = grid
        .iter()
        .zip(&errors)
        .filter(|(_, e)| e.abs() > VANISHING)
        .map(|(x, e)| (x.ln(), e.abs().ln()))
        .collect();
    if 2 * kept.len() < grid.len() {
        return Err(Error::DegenerateGrid(format!(
            "{} of {} errors vanish",
            grid.len() - kept.len(),
            grid.len()
        )));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let mut fit = ExponentFit {
        grid,
        errors,
        fitted_slope: sxy / sxx,
        theory_slope,
        normalized_sup: None,
    };
    fit.normalized_sup = fit.normalized().map(|v| v.into_iter().fold(0.0, f64::max));
    Ok(fit)
}

/// Error terms over `grid`, evaluated in parallel, and their fit.
pub fn fit_exponent(case: &RieszCase, grid: &[f64]) -> Result<ExponentFit> {
    let theory = theory_exponent(case)?;
    let errors = grid
        .par_iter()
        .map(|&x| error_term(case, x))
        .collect::<Result<Vec<f64>>>()?;
    fit_errors(grid.to_vec(), errors, theory)
}
