use thiserror::Error;

use crate::grid::Axis;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("axis {axis:?} not present in a {dims}-dimensional field")]
    MissingAxis { axis: Axis, dims: usize },

    #[error("evolution unstable at step {step}: sup norm grew from {before:e} to {after:e}")]
    Unstable { step: usize, before: f64, after: f64 },

    #[error("empty probe set")]
    EmptyProbes,

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("{path}:{line}: {reason}")]
    Config {
        path: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
