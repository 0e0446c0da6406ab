use thiserror::Error;

/// Errors raised by the circulant algebra.
///
/// Slice indices are 0-based (slice `j` holds Fourier coefficient `j + 1`).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircError {
    #[error("empty parameter list")]
    Empty,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero divisor: Fourier coefficients {slices:?} vanish")]
    ZeroDivisor { slices: Vec<usize> },
    #[error("ordering requires a real spectrum; coefficient {index} is complex")]
    NonRealSpectrum { index: usize },
    #[error("conjugate symmetry violated by {deviation:e} (tolerance {tol:e})")]
    SymmetryViolation { deviation: f64, tol: f64 },
    #[error("singular Fourier slices {slices:?}")]
    SingularSlice { slices: Vec<usize> },
    #[error("Fourier slice {slice} is defective (eigenvector condition {condition:e})")]
    DefectiveSlice { slice: usize, condition: f64 },
    #[error("dense eigensolver failed on slice {slice}")]
    EigenFailure { slice: usize },
    #[error("enumeration of {count} combinations exceeds cap {cap}")]
    CapExceeded { count: f64, cap: usize },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("eigenvector must be nonzero")]
    ZeroVector,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = CircError> = std::result::Result<T, E>;
