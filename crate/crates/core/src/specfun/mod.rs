//! Special functions on binary64: complex log-gamma, digamma, Bessel J/Y/K,
//! the Voronoi kernel, and compensated summation.

mod bessel;
mod gamma;
mod sum;

pub use bessel::{bessel_j, bessel_k, bessel_y, voronoi_kernel_i};
pub use gamma::{digamma, euler_gamma, gamma, ln_gamma_real, log_gamma, EULER_GAMMA};
pub use sum::{neumaier_sum, Accumulator, FloatFormat, NeumaierSum, Precision, SumMode};

pub(crate) use gamma::{cos_pi, ln_gamma, sin_pi};
