use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimated error {estimate:e} after {intervals} intervals)")]
    NonConvergentQuadrature {
        tol: f64,
        estimate: f64,
        intervals: usize,
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular (|det| = {0:e} after normalization)")]
    SingularMatrix(f64),

    #[error("matrix does not map the upper half-plane into itself")]
    NotEndomatrix,

    #[error("matrix is not proportional to a real matrix of positive determinant")]
    NotRealAutomatrix,

    #[error("boundary image is degenerate")]
    DegenerateImage,

    #[error("left translate at s = {0} has a bounded image; no contact decomposition")]
    NotUnboundedCase(String),

    #[error("boundary limit did not converge at {location}: {reason}")]
    NoConvergence { location: String, reason: String },

    #[error("polynomial root finding failed: {0}")]
    RootFindingFailure(String),

    #[error("pole in the upper half-plane at {0}")]
    PoleInUpperHalfPlane(Complex64),

    #[error("critical point enumeration failed: {0}")]
    CriticalPointFailure(String),

    #[error("unsupported density: {0}")]
    UnsupportedDensity(String),

    #[error("boundary limit violated at {point}: residual {residual:e}")]
    ViolationDetected { point: Complex64, residual: f64 },
}
