use thiserror::Error;

/// Errors produced by the frame toolbox.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("the Alltop window requires a prime dimension M >= 5, got {0}")]
    AlltopRequiresPrime(usize),
    #[error("frame set is empty")]
    EmptyFrameSet,
    #[error("column {column} is not unit-norm (norm {norm:.12})")]
    NotUnitNorm { column: usize, norm: f64 },
    #[error("permutation search supports m <= 8, got m = {0}")]
    MTooLarge(usize),
    #[error("exact trace sum needs {terms:.3e} terms, above the limit of {limit:.0e}")]
    TooManyTerms { terms: f64, limit: f64 },
    #[error("binomial({n}, {k}) = {count:.0} subsets exceeds the exhaustive limit of {limit:.0e}")]
    SubsetTooLarge { n: usize, k: usize, count: f64, limit: f64 },
    #[error("basis {0} is not orthonormal")]
    NotOrthonormalBasis(usize),
    #[error("cross-basis coherence between bases {0} and {1} is {2:.12}, above 1/sqrt(M)")]
    CoherenceExceeded(usize, usize, f64),
    #[error("invalid basis assignment: {0}")]
    InvalidAssignment(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Broad failure class, used by front ends to pick exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::TooManyTerms { .. } | Error::SubsetTooLarge { .. } => ErrorClass::ResourceGuard,
            Error::InvalidParameter(_)
            | Error::Parse(_)
            | Error::AlltopRequiresPrime(_)
            | Error::InvalidAssignment(_)
            | Error::MTooLarge(_) => ErrorClass::Config,
            _ => ErrorClass::Numerical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    ResourceGuard,
}

pub type Result<T> = std::result::Result<T, Error>;
