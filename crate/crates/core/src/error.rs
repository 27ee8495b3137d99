use thiserror::Error;

/// Errors raised by constructions, checks and document handling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MubError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("theta = {theta} is invalid for p = {p}: 1 + theta^2 is a quadratic residue")]
    InvalidTheta { p: u64, theta: u64 },

    #[error("malformed document: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MubError {
    fn from(err: std::io::Error) -> Self {
        MubError::Io(err.to_string())
    }
}

impl From<serde_json::Error> for MubError {
    fn from(err: serde_json::Error) -> Self {
        MubError::Format(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MubError>;

pub(crate) fn invalid(msg: impl Into<String>) -> MubError {
    MubError::InvalidArgument(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> MubError {
    MubError::UnsupportedDimension(msg.into())
}
