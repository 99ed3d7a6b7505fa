//! Error types shared across the crate.

/// Errors produced by solver and dynamics routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Root isolation or eigenvector refinement did not converge. This
    /// signals a numerics bug rather than a bad input.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// An initial state needs a larger block than the configured cap allows.
    #[error("capacity exceeded: state requires blocks up to s = {required_s}, cap is {cap}")]
    Capacity { required_s: usize, cap: usize },

    /// A measure is undefined for the given inputs (e.g. an all-zero
    /// reference spectrum).
    #[error("measure undefined: {0}")]
    UndefinedMeasure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
