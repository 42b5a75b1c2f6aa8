//! Numerical verification of two-parameter Riesz-sum identities for divisor
//! sums attached to Dedekind zeta functions of `Q` and real quadratic fields,
//! plus empirical checks of their error-term exponents.
//!
//! Modules build on each other bottom-up: [`arith`] and [`characters`] supply
//! the exact coefficients, [`specfun`] and [`meijer`] the analytic kernels,
//! [`lfunc`] the Laurent data, [`identities`] evaluates both sides of each
//! identity, and [`bigo`] studies the error terms.

pub mod arith;
pub mod bigo;
pub mod characters;
pub mod cli;
pub mod error;
pub mod identities;
pub mod lfunc;
pub mod meijer;
pub mod specfun;

pub use error::{Error, Result};
