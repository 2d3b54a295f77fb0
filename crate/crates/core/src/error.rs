//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Operator-level work was requested above the configured size cap.
    #[error("operator dimension {dim} exceeds size cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    /// A region is empty on the probability simplex.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// A scalar-search family has no admissible member.
    #[error("region family empty under constraint: {0}")]
    EmptyFamily(String),

    /// The optimizer hit its iteration cap without meeting the tolerance.
    #[error("optimizer did not converge within {iterations} iterations (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    /// An exactness invariant failed; indicates a bug, not bad input.
    #[error("internal arithmetic error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
