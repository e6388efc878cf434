use thiserror::Error;

use crate::rational::{format_rational, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coefficients, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid surface model: {0}")]
    InvalidSurface(String),

    #[error("invalid cyclic cover: {0}")]
    InvalidCover(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    // Boxed to keep `Result`s small.
    #[error("bundle is not semistable (mu_max = {}, mu_min = {})", format_rational(.mu_max), format_rational(.mu_min))]
    NotSemistable { mu_max: Box<Q>, mu_min: Box<Q> },

    #[error("filtration rank check failed: pieces sum to {found}, expected {expected}")]
    RankConservation { expected: u64, found: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
