use thiserror::Error;

use crate::identities::VerificationReport;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of {0}")]
    Pole(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A series or quadrature failed to settle; `best` carries the last
    /// report when one is available.
    #[error("no convergence: {reason}")]
    NonConvergence {
        reason: String,
        best: Option<Box<VerificationReport>>,
    },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
}

impl Error {
    pub(crate) fn stalled(reason: impl Into<String>) -> Self {
        Error::NonConvergence {
            reason: reason.into(),
            best: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
