//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by structured-matrix operations.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite entry at position {0}")]
    NonFiniteEntry(usize),

    #[error("invalid scalar: {0}")]
    InvalidScalar(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("singular displacement operator ({pattern}): {detail}")]
    SingularOperator {
        pattern: &'static str,
        detail: String,
    },

    #[error("knot collision: {0}")]
    KnotCollision(String),

    #[error("degenerate center: knot {index} coincides with the center")]
    DegenerateCenter { index: usize },

    #[error("knot sets not separated: theta = {theta}")]
    NotSeparated { theta: f64 },

    #[error("partition too coarse: {0}")]
    PartitionTooCoarse(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(f64),

    #[error("ill conditioned: estimate {estimate:.3e} exceeds threshold {threshold:.3e}")]
    IllConditioned { estimate: f64, threshold: f64 },

    #[error(
        "conditioning warning: multiplier amplification {amplification:.3e} exceeds {threshold:.3e}"
    )]
    ConditioningWarning {
        amplification: f64,
        threshold: f64,
    },

    #[error("magnitude overflow: {0}; rescale the knots toward the unit circle")]
    MagnitudeOverflow(String),

    #[error("wrong structure class: expected {expected}, found {found}")]
    WrongClass {
        expected: &'static str,
        found: String,
    },

    #[error("non-real knot at index {index}: imaginary part {imag:.3e}")]
    NonRealKnot { index: usize, imag: f64 },

    #[error("knot at index {index} lies off the stated line by {distance:.3e}")]
    OffLineKnot { index: usize, distance: f64 },

    #[error("knot at index {index} lies off the circle by {distance:.3e}")]
    OffCircleKnot { index: usize, distance: f64 },

    #[error("admissible-block rank {needed} exceeds the hard cap {cap}")]
    RankOverflow { needed: usize, cap: usize },

    #[error("iteration failed to converge: {0}")]
    ConvergenceFailure(String),
}

impl Error {
    /// Machine-parsable failure class for diagnostics and CLI exit handling.
    pub fn class_token(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) | Error::EmptyInput(_) => "dimension",
            Error::NonFiniteEntry(_) => "non-finite",
            Error::InvalidScalar(_) => "invalid-scalar",
            Error::Inconsistent(_) => "inconsistent",
            Error::SingularMatrix(_) => "singular",
            Error::SingularOperator { .. } => "singular-operator",
            Error::KnotCollision(_) => "knot-collision",
            Error::DegenerateCenter { .. } => "degenerate-center",
            Error::NotSeparated { .. } => "not-separated",
            Error::PartitionTooCoarse(_) => "partition-too-coarse",
            Error::InvalidTolerance(_) => "invalid-tolerance",
            Error::IllConditioned { .. } | Error::ConvergenceFailure(_) => "ill-conditioned",
            Error::ConditioningWarning { .. } => "conditioning-warning",
            Error::MagnitudeOverflow(_) => "magnitude-overflow",
            Error::WrongClass { .. } => "wrong-class",
            Error::NonRealKnot { .. } => "non-real-knot",
            Error::OffLineKnot { .. } => "off-line-knot",
            Error::OffCircleKnot { .. } => "off-circle-knot",
            Error::RankOverflow { .. } => "rank-overflow",
        }
    }

    /// True for failures of numerical preconditions (as opposed to usage errors).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch(_) | Error::EmptyInput(_) | Error::Inconsistent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
