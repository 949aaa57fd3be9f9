use thiserror::Error;

use crate::poly::OrderKind;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("recurrence coefficients of `{system}` exhausted at index {index}")]
    CoefficientExhausted { system: String, index: usize },

    #[error("operation requires a monic system, `{0}` is not monic")]
    UnsupportedNormalization(String),

    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),

    #[error("unknown orthogonal system `{0}`")]
    UnknownSystem(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate nodes: {0}")]
    DegenerateNodes(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid fraction: {0}")]
    InvalidFraction(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial is in the wrong basis for this operation: {0}")]
    WrongBasis(&'static str),

    #[error("the zero polynomial has no degree")]
    UndefinedDegree,

    #[error("term order {0} is not degree compatible")]
    NotDegreeCompatible(OrderKind),

    #[error("standard set does not match the design: {0}")]
    InconsistentStandardSet(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of floating point machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Numeric(_) | Error::DegenerateNodes(_) | Error::InconsistentStandardSet(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
