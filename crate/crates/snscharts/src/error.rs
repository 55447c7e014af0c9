use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A matrix could not be inverted; the determinant is reported.
    #[error("singular matrix (det = {det:.3e})")]
    SingularMatrix { det: f64 },
    /// The requested chart parameters have no tabulated bounds.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
