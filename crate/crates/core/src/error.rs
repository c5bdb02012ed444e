use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid site {coords:?} for lattice of linear size {size}")]
    InvalidSite { coords: Vec<usize>, size: usize },

    #[error("basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("state with total occupation {total} lies outside the truncation M = {cutoff}")]
    OutOfTruncation { total: usize, cutoff: usize },

    #[error("state has {got} sites, basis has {expected}")]
    StateLength { got: usize, expected: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("hopping is not Hermitian: t({displacement:?}) and t(-{displacement:?}) are not conjugate")]
    NonHermitianHopping { displacement: Vec<i64> },

    #[error("operator is not Hermitian (max |H - H†| = {defect:e})")]
    NonHermitian { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
