use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("term {term} is not Hermitian (max-entry defect {defect:e})")]
    NonHermitian { term: usize, defect: f64 },

    #[error("term {term}: support site {site} is outside the lattice")]
    SupportOutsideLattice { term: usize, site: usize },

    #[error("term {term}: {reason}")]
    InvalidTerm { term: usize, reason: String },

    #[error("interaction has no terms")]
    EmptyInteraction,

    #[error("invalid region split: {0}")]
    InvalidSplit(String),

    #[error("term {term} straddles L and its complement without lying in the boundary region")]
    StraddlingTerm { term: usize },

    #[error("Hilbert dimension {dim} exceeds the dense cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge (dimension {dim}, max |entry| {max_entry:e})")]
    EigenNonConvergence { dim: usize, max_entry: f64 },

    #[error("function is not finite at eigenvalue {eigenvalue}")]
    FunctionOverflow { eigenvalue: f64 },

    #[error("invalid product state: {0}")]
    InvalidProductState(String),

    #[error("cutoff M = {cutoff} must exceed the boundary norm {boundary_norm}")]
    CutoffTooSmall { cutoff: f64, boundary_norm: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid truncation geometry: {0}")]
    InvalidGeometry(String),

    #[error("lattice window clipped: {0}")]
    ClippedWindow(String),

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("config: {0}")]
    Config(String),

    #[error("certificate FAIL: {0}")]
    CertificateFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
