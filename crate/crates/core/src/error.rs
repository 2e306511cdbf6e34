use alloc::vec::Vec;

use thiserror::Error;

/// Errors produced by the entanglement-polynomial toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("local dimension must be at least 2, got {0}")]
    LocalDimTooSmall(usize),

    #[error("local dimension mismatch: {left} vs {right}")]
    LocalDimMismatch { left: usize, right: usize },

    #[error("expected length {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("site {site} out of range for {num_sites} sites")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("support lists site {0} more than once")]
    DuplicateSite(usize),

    #[error("operator supports overlap")]
    OverlappingSupports,

    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("locality {k} out of range for {num_sites} sites")]
    LocalityOutOfRange { k: usize, num_sites: usize },

    #[error("state vector is zero")]
    ZeroState,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("no clean numerical rank: rank {rank} with gap ratio {gap_ratio:e}")]
    IllConditionedRank { rank: usize, gap_ratio: f64 },

    #[error("rank method gives |W_k| = {rank:?}, span oracle gives {oracle:?}")]
    MethodDisagreement {
        rank: Vec<usize>,
        oracle: Vec<usize>,
    },

    #[error("weights must be strictly positive and finite")]
    NonPositiveWeight,

    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },

    #[error("rank formula needs a pure state (purity {purity})")]
    MixedState { purity: f64 },

    #[error("operator annihilates the state")]
    AnnihilatedState,

    #[error("operator is singular")]
    SingularOperator,

    #[error("condition-number rejection sampling gave up after {0} attempts")]
    SamplingFailure(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("structural invariant violated: {0}")]
    InvariantViolation(&'static str),

    #[error("cannot parse polynomial: {0}")]
    PolynomialParse(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
