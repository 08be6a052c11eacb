use thiserror::Error;

use crate::model_io::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("expected {expected} entries, found {found}")]
    DataLength { expected: usize, found: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Mismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Failure to read a gain model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// The text parsed but the model breaks an invariant.
    #[error("{0}")]
    Invalid(Violation),
}

/// Bad numeric configuration or a name that does not resolve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} must be a finite real > 1, got {value}")]
    Threshold { name: &'static str, value: f64 },
    #[error("singular_tol must lie in (0, 1e-6), got {0}")]
    SingularTol(f64),
    #[error("min_magnitude must lie in (0, 1], got {0}")]
    MinMagnitude(f64),
    #[error("submatrix order {k} out of range 3..={max}")]
    Order { k: usize, max: usize },
    #[error("unknown variable pair {cv}:{mv}")]
    UnknownPair { cv: String, mv: String },
    #[error("pair {cv}:{mv} appears in both include and exclude lists")]
    ConflictingPair { cv: String, mv: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapError {
    #[error("zero gains are never snapped")]
    Zero,
    #[error("gain magnitude {magnitude} lies outside the grid [{lowest}, 1]")]
    OutOfRange { magnitude: f64, lowest: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unity scaling needs four non-zero gains")]
pub struct ZeroGainError;

/// Crate-level error for the composed pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Snap(#[from] SnapError),
}
