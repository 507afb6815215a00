use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("operands live on different frames")]
    FrameMismatch,
    #[error("matrix is singular at every sample point")]
    Singular,
    #[error("order {got} is below the minimum {min}")]
    Order { got: usize, min: usize },
    #[error("extraction residual does not vanish: {0}")]
    ExtractionFailure(String),
    #[error("spectral parameters are not pairwise distinct")]
    RepeatedParameters,
    #[error("degenerate web: {0}")]
    Degenerate(String),
    #[error("inconsistent interpolation: {0}")]
    Inconsistent(String),
    #[error("invalid test values: {0}")]
    InvalidSamples(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
