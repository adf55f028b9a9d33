use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block frequency for n = {n} is imaginary (Omega^2 + 2 hbar g2 n / m = {radicand:e})")]
    NegativeBlockFrequency { n: usize, radicand: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cavity dispersion derivative is singular (|r cos(4 pi x0 / lambda)| = 1)")]
    DerivativeSingular,

    #[error("Gaussian integral does not converge: symmetric Re(A) is not positive definite")]
    NonConvergentGaussian,

    #[error("quadratic form matrix A is singular")]
    SingularA,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("state is singular (minimum eigenvalue {0:e}); use the eigendecomposition route")]
    SingularState(f64),

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("time series is not uniformly sampled")]
    NonUniformSampling,

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
