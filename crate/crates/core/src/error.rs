use thiserror::Error;

use crate::convolution::SearchLog;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("seminorm with tail requested but the series carries no tail descriptor")]
    TailUnavailable,

    #[error("gap block {0} exceeds 170, 1/m! is not representable in double precision")]
    BlockTooLarge(u32),

    #[error("function depends on {essential} variables, cannot embed into cylinder {cylinder}")]
    DimensionTooSmall { essential: usize, cylinder: usize },

    #[error("operator is a scalar multiple of the identity")]
    TrivialOperator,

    #[error("no dichotomy points found within the search budget ({} rays)", .0.rays.len())]
    NotFound(Box<SearchLog>),

    #[error("generators are linearly dependent (rank {rank} < {count})")]
    DependentGenerators { rank: usize, count: usize },

    #[error("associated operator of `{operator}` at n = {n} differs from witness operator `{witness}`")]
    AssociatedMismatch {
        operator: String,
        witness: String,
        n: usize,
    },

    #[error("pair scalars are equal")]
    EqualScalars,

    #[error("|alpha - lambda| = {0:e} outside [1e-6, 1e6]")]
    ScaleOutOfRange(f64),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
