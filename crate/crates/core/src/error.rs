use thiserror::Error;

/// Errors produced by simulation, sampling, and inference routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The limit-law prediction was requested outside the hypotheses it
    /// is derived under (non-symmetric innovations).
    #[error("limit-law hypothesis violated: {detail}")]
    LimitHypothesis { detail: String },

    /// The series truncation length is too small for the requested
    /// tail tolerance.
    #[error("truncation error: {detail}")]
    Truncation { detail: String },

    /// The empirical characteristic function is numerically degenerate
    /// (|phi| pinned at 1 or 0 on the probe grid, even after rescaling).
    #[error("degenerate empirical characteristic function: {detail}")]
    DegenerateEcf { detail: String },

    /// A quadrature or root-finding routine could not meet its tolerance.
    #[error(
        "numeric tolerance not met for {what}: achieved {achieved:.3e}, \
         requested {requested:.3e} ({detail})"
    )]
    NumericTolerance {
        what: String,
        achieved: f64,
        requested: f64,
        detail: String,
    },

    /// Malformed input data or configuration.
    #[error("parse error: {detail}")]
    Parse { detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
