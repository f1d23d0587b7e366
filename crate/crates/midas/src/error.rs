//! Error type shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by dataset, sampling, mixing, training, and I/O operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An annotator vote names a class outside `[0, classes)`.
    #[error("invalid vote: class index {index} out of range for {classes} classes")]
    InvalidVote { index: usize, classes: usize },

    /// A numeric input was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// A parameter is outside its legal range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation needs more samples than the dataset provides.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Tensor or vector shapes do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Inputs to an aggregation were inconsistent (lengths, indices).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A value failed a structural invariant (simplex sum, id uniqueness, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A stored file does not match the expected on-disk format.
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// Filesystem failure, annotated with the path involved.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A run configuration is invalid (maps to CLI exit code 2).
    #[error("config error: {0}")]
    Config(String),

    /// An evaluation was requested over zero samples.
    #[error("empty evaluation: no samples to score")]
    EmptyEvaluation,

    /// A resampling target cannot be met from the available samples.
    #[error("infeasible resample: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
