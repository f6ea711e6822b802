use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is singular")]
    Singular,
    #[error("no usable prime found after {0} attempts")]
    NoPrime(usize),
    #[error("no rational fit within bound (recurrence order <= {max_order}, {terms} terms)")]
    NoRationalFit { max_order: usize, terms: usize },
    #[error("size guard: {0}")]
    SizeGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
