use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("points live on different lattices")]
    LatticeMismatch,
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("gram matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("length bound must be positive and finite")]
    InvalidBound,
    #[error("vector is not a unit vector (norm {norm})")]
    NonUnit { norm: f64 },
    #[error("matrix is not special unitary (deviation {deviation:e})")]
    NotSpecialUnitary { deviation: f64 },
    #[error("eigenvalue gap {gap:e} is too close to the clustering threshold")]
    IllConditioned { gap: f64 },
    #[error("configuration is singular (defect {defect})")]
    SingularConfiguration { defect: usize },
    #[error("element is not regular")]
    NotRegular,
    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
