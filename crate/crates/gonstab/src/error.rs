//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two bodies are (numerically) coincident, the potential is singular.
    #[error("collision: bodies {i} and {j} at distance {dist:.3e}")]
    Collision { i: usize, j: usize, dist: f64 },

    /// An internal consistency check failed; this signals a formula
    /// transcription bug, not a user error.
    #[error("assertion failure: {0}")]
    AssertionFailure(String),

    /// A numerical verification exceeded its tolerance.
    #[error("verification failure in block {block}: residual {residual:.3e} > {tolerance:.3e}")]
    VerificationFailure {
        block: String,
        residual: f64,
        tolerance: f64,
    },

    /// Adaptive step control collapsed or the step budget was exhausted.
    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    /// Eigenvalue counts did not stabilize under truncation refinement.
    #[error("convergence failure: counts {0} at successive truncations")]
    ConvergenceFailure(String),

    /// A mathematical property that should hold was violated; carries the
    /// counterexample.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// A regenerated table deviates from its golden data beyond tolerance.
    #[error("golden mismatch in table {table}: max deviation {deviation:.3e} > {tolerance:.3e}")]
    GoldenMismatch {
        table: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
