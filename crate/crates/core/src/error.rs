use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("spectral point outside the admissible domain: {0}")]
    Domain(String),
    #[error("spectral grid is empty after excluding neighbourhoods of z = 1 and z = -1")]
    EmptyGrid,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("profile is not a single-site defect: {0}")]
    NotPointDefect(String),
    #[error("plane-wave fit is degenerate: {0}")]
    DegenerateFit(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
