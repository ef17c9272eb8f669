//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (non-positive length, probability
    /// outside [0, 1], ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration file could not be read or parsed, or contained
    /// unknown/inconsistent keys.
    #[error("config error: {0}")]
    Config(String),

    /// The adaptive integrator failed to reach the requested tolerance.
    #[error("integration failed: {0}")]
    Integration(String),

    /// A correlation functional was requested for a trajectory that emits
    /// no photons; the normalization is below threshold.
    #[error("no emission: correlation normalization below {0:.1e}, result undefined")]
    UndefinedResult(f64),

    /// Bath calibration could not bracket or converge on the target ratio.
    /// Carries the (alpha, ratio) pairs probed so far.
    #[error("calibration failed: {reason}; scan trace: {scan:?}")]
    Calibration {
        reason: String,
        scan: Vec<(f64, f64)>,
    },

    /// Least-squares fit on degenerate input.
    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code contract: 1 for configuration problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }
}
