//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("zero vector cannot be normalized: degenerate state")]
    DegenerateState,

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace must be 1, found {trace:.12}")]
    NonUnitTrace { trace: f64 },

    #[error("matrix has negative eigenvalue {value:.3e}")]
    NotPositiveSemidefinite { value: f64 },

    #[error("matrix is not a projector (idempotency deviation {deviation:.3e})")]
    NotProjector { deviation: f64 },

    #[error("purity {purity} is unreachable at rank {rank}; feasible range is [{min:.6}, 1]")]
    InfeasiblePurity { purity: f64, rank: usize, min: f64 },

    #[error("tomography settings do not span the state space (design matrix rank deficient)")]
    RankDeficient,

    #[error("reference unobserved in block {block}: zero monitor counts, choose a better reference vector")]
    ReferenceUnobserved { block: usize },

    #[error("count record does not match the measurement plan: {0}")]
    PlanMismatch(String),

    #[error("state is not bipartite: {0}")]
    NotBipartite(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
