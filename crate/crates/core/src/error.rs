use thiserror::Error;

use crate::combinatorics::Family;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("family {family} is not supported by {operation}")]
    UnsupportedFamily {
        family: Family,
        operation: &'static str,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("general position violated: {0}")]
    GeneralPosition(String),

    #[error("combinatorial budget exceeded: {0}")]
    Budget(String),

    /// The projection found no face (or more than one) satisfying the
    /// optimality conditions; callers redraw the input point.
    #[error("projection onto cone is degenerate for this input")]
    ProjectionTie,

    #[error("sampler exhausted after {attempts} attempts: {reason}")]
    Exhausted { attempts: u64, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
