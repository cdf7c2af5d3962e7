use thiserror::Error;

/// Errors raised by the engine.
///
/// Mathematical outcomes (infeasible programs, failed consistency checks,
/// empty joint sets) are *not* errors; they are reported through the
/// corresponding result types. Errors are reserved for malformed input,
/// violated preconditions and exhausted resource caps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid rational {text:?}: {reason}")]
    ParseRational { text: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point is not separable: it lies in the set")]
    NotSeparable,

    #[error("polyhedron is unbounded; only polytopes are supported")]
    Unbounded,

    #[error("empty joint set")]
    EmptyJoint,

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: String,
        needed: u128,
        cap: u128,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
