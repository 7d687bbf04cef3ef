//! Error type shared by all modules of the core crate.

use alloc::string::String;
use core::fmt;

/// Errors produced by matrix construction, training, and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum EcocError {
    /// A parameter violates a precondition (bad scheme arguments, empty
    /// ranges, out-of-range indices).
    InvalidParameters(String),
    /// A valid random matrix or column could not be sampled within the
    /// retry budget.
    GenerationFailure(String),
    /// Two code vectors of different lengths were compared.
    LengthMismatch { left: usize, right: usize },
    /// Feature dimensionality does not match the fitted model.
    DimensionMismatch { expected: usize, got: usize },
    /// A training subproblem has fewer than two groups.
    DegenerateTask(String),
    /// Every column of the coding matrix is degenerate on the given data.
    UntrainableMatrix,
    /// The minimum row distance is zero, so the bound is undefined.
    UndefinedBound,
    /// A label lies outside the valid class range.
    LabelOutOfRange { label: i64, n_classes: u32 },
    /// A feature value is NaN or infinite.
    NonFiniteFeature { row: usize, col: usize },
    /// A coding matrix violates a structural invariant.
    InvariantViolation(String),
}

impl fmt::Display for EcocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcocError::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            EcocError::GenerationFailure(msg) => write!(f, "generation failure: {msg}"),
            EcocError::LengthMismatch { left, right } => {
                write!(f, "code length mismatch: {left} vs {right}")
            }
            EcocError::DimensionMismatch { expected, got } => {
                write!(f, "feature dimension mismatch: expected {expected}, got {got}")
            }
            EcocError::DegenerateTask(msg) => write!(f, "degenerate task: {msg}"),
            EcocError::UntrainableMatrix => {
                write!(f, "untrainable matrix: every column is degenerate on this data")
            }
            EcocError::UndefinedBound => {
                write!(f, "undefined bound: minimum row distance is zero")
            }
            EcocError::LabelOutOfRange { label, n_classes } => {
                write!(f, "label {label} outside 1..={n_classes}")
            }
            EcocError::NonFiniteFeature { row, col } => {
                write!(f, "non-finite feature at row {row}, column {col}")
            }
            EcocError::InvariantViolation(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

impl core::error::Error for EcocError {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, EcocError>;
