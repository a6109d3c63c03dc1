use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude matrix is empty")]
    EmptyMatrix,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized: squared norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("negative coefficient {value} at index {index}")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("spectrum has no nonzero coefficients")]
    ZeroSpectrum,

    #[error("ensemble probabilities sum to {sum}, expected 1")]
    EnsembleNotNormalized { sum: f64 },

    #[error("ensemble has no entries with positive probability")]
    EmptyEnsemble,

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("weight vector has length {got}, expected {expected}")]
    WeightLengthMismatch { expected: usize, got: usize },

    #[error("requested {requested} coefficients, cap is {cap}")]
    SizeCapExceeded { requested: u128, cap: u64 },

    #[error("measurement is incomplete on the state support (residual {residual:e})")]
    IncompletePovm { residual: f64 },

    #[error("instance too large for enumeration: {vars} variables + {constraints} constraints > {limit}")]
    TooLarge {
        vars: usize,
        constraints: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program did not reach an optimum: {0}")]
    NotOptimal(String),
}
