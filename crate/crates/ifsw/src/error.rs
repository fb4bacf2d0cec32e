//! Crate-wide error type.
//!
//! Only genuine failures are errors: malformed input, domain violations,
//! dimension mismatches, I/O. Solver non-convergence is *not* an error —
//! iterative solvers return their result with a `converged` flag and
//! diagnostics, because a non-convergent run is itself informative (some
//! systems provably have no positive eigenfunction, and the solvers are
//! expected to detect that rather than crash).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The expression source could not be parsed. `position` is a byte
    /// offset into the source string.
    #[error("parse error at offset {position}: {message}")]
    Parse { message: String, position: usize },

    /// An expression evaluated to a non-finite value.
    #[error("domain error in `{expr}`: {message}")]
    Domain { expr: String, message: String },

    /// An expression mentions a variable beyond the state-space dimension.
    #[error("expression needs x{needed} but the state space has dimension {dim}")]
    Dimension { needed: usize, dim: usize },

    /// A point lies outside the unit cube beyond the clamping tolerance.
    #[error("point {point:?} lies outside [0,1]^{dim} by {excess:.3e}")]
    OutsideDomain {
        point: Vec<f64>,
        dim: usize,
        excess: f64,
    },

    /// Two grid functions or a function and an operator disagree on the
    /// underlying grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A structural problem with a system definition (map/weight counts,
    /// dimensions, empty families, …).
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    /// Weights must be strictly positive for spectral computations.
    #[error("nonpositive weight: {0}")]
    NonPositiveWeight(String),

    /// A requested computation needs more work than the configured budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A precondition on solver output quality was violated.
    #[error("{0}")]
    Precondition(String),

    /// A configuration file problem; `field` names the offending entry.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
