use thiserror::Error;

/// Errors raised by the algebra, model and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix dimension {dim} exceeds the dense cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("empty operand list")]
    Empty,

    #[error("enumeration bound exceeded: n = {n}, maximum is {max}")]
    EnumerationBound { n: usize, max: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rotation axis is not a unit vector (norm^2 = {0})")]
    NonUnitAxis(f64),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("a0 + a1 vanishes: the product-form rotated state is null")]
    NullGhzState,

    #[error("product form disagrees with the superposition form (deviation {0:e})")]
    ProductFormMismatch(f64),

    #[error("effective distance {0:e} is too small; gamma is singular")]
    SingularDistance(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("I/O error: {0}")]
    Io(String),
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
