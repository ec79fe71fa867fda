//! Error type shared across the crate, with the CLI exit-code taxonomy.

use thiserror::Error;

/// Errors produced by complex construction, geometry, solvers and I/O.
#[derive(Debug, Error)]
pub enum BettiError {
    /// Malformed input (bad CLI value, bad JSON/OFF syntax, bad parameters).
    #[error("parse error: {0}")]
    Parse(String),

    /// Input violates a structural precondition (open manifold, degenerate
    /// geometry, out-of-range degree, dimension mismatch).
    #[error("validation error: {0}")]
    Validation(String),

    /// A cross-check against the homology oracle disagreed.
    #[error("verification mismatch: {0}")]
    VerifyMismatch(String),

    /// Filesystem failure while reading or writing.
    #[error("i/o error: {0}")]
    Io(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("solver did not converge: {0}")]
    Solver(String),
}

impl BettiError {
    /// Exit code taxonomy: 0 success, 1 usage/parse, 2 validation,
    /// 3 verification mismatch, 4 I/O. Solver failures count as validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            BettiError::Parse(_) => 1,
            BettiError::Validation(_) | BettiError::Solver(_) => 2,
            BettiError::VerifyMismatch(_) => 3,
            BettiError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for BettiError {
    fn from(e: std::io::Error) -> Self {
        BettiError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BettiError>;
