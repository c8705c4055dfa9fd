use thiserror::Error;

/// Errors produced by problem construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("basis is rank deficient: vector {index} lies in the span of the preceding ones")]
    RankDeficient { index: usize },
    #[error("point lies outside the constraint subspace (distance {distance:.3e})")]
    OutsideSubspace { distance: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("malformed fixture: {0}")]
    MalformedFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
