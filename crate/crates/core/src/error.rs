use thiserror::Error;

/// Errors raised by the solvers and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("alpha = 1 has no Lévy measure; the time derivative is local (ordinary derivative)")]
    LocalTimeDerivative,
    #[error("spectral condition violated: lambda_1 + Lambda = {0} < 0")]
    SpectralCondition(f64),
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("boundary grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
