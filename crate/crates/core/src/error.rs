use thiserror::Error;

/// Errors raised by model construction and the numerical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("GOI covariance parameter c = {c} is below the admissible bound -1/N = {bound} (N = {n})")]
    ParameterOutOfRange { n: usize, c: f64, bound: f64 },

    #[error("matrix size N must be at least 1")]
    ZeroDimension,

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("impossible isotropic field: {quantity} = {value} exceeds the bound (N+2)/N = {bound} for N = {n}")]
    ImpossibleField {
        n: usize,
        quantity: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("method unavailable: {0}")]
    MethodUnavailable(String),

    #[error("regime unsupported: {0}")]
    RegimeUnsupported(String),

    #[error("index {index} out of range 0..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("height distribution of index {index} undefined: expected total count {value} is zero within its error {error}")]
    UndefinedDistribution { index: usize, value: f64, error: f64 },

    #[error("insufficient data: {have} points of index {index}, need at least {need}")]
    InsufficientData { index: usize, have: usize, need: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
