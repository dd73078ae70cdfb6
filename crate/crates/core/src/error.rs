use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "quadrature rule too small: {nodes} nodes per axis cannot resolve degree cap {degree_cap}"
    )]
    InsufficientQuadrature { nodes: usize, degree_cap: u32 },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("hypothesis not satisfied: {0}")]
    HypothesisViolated(String),

    #[error("NaN encountered in {0}")]
    NotANumber(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::NonConvergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
