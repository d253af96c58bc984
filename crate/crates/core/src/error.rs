use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Input outside the domain of an operation (non-dominant weight,
    /// point off `X^τ`, exponential outside its injectivity ball, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("ill-conditioned Gram matrix (condition number {cond:.3e}): {hint}")]
    IllConditioned { cond: f64, hint: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Group/feature combination outside what this crate instantiates.
    #[error("not implemented: {0}")]
    Unimplemented(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
