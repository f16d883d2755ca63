//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors that must live over the same sample space do not.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A state or row index outside the valid range.
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// A gamble or mass vector contains NaN or an infinity.
    #[error("non-finite entry {value} at position {position}")]
    NonFinite { position: usize, value: f64 },

    /// A mass vector is not a probability distribution within tolerance.
    #[error("invalid probability mass vector: {reason}")]
    InvalidMass { reason: String },

    /// The assessment admits no compatible linear prevision at all.
    #[error("assessment incurs sure loss: the credal set is empty")]
    SureLoss,

    /// An operation that needs at least one assessed gamble got none.
    #[error("degenerate assessment: no original constraint rows")]
    DegenerateAssessment,

    /// Distance requested between (numerically) identical points.
    #[error("degenerate pair: the two previsions coincide within tolerance")]
    DegeneratePair,

    /// A brute-force oracle was asked to run beyond its size guard.
    #[error("size guard exceeded: {actual} > {limit} ({what})")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// Invalid argument outside the other categories.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Assessment document could not be parsed or validated.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
