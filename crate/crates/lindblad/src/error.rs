//! Error type shared by the full-model simulation.

use thiserror::Error;

/// Failure modes of spectrum construction and master-equation evolution.
#[derive(Debug, Error)]
pub enum LindbladError {
    /// A parameter is outside its physical domain; `field` names it.
    #[error("invalid {field}: {message}")]
    DomainError { field: &'static str, message: String },
    /// Dressed-state labeling by bare-state overlap became ambiguous.
    #[error("state labeling failed: {0}")]
    LabelingError(String),
    /// The density-matrix trace drifted beyond tolerance during evolution.
    #[error("trace drift: {0}")]
    TraceDriftError(String),
    /// Too much population reached the highest Fock levels for the cavity
    /// cutoff to be trustworthy.
    #[error("truncation overflow: {0}")]
    TruncationError(String),
    /// An iterative routine failed to converge.
    #[error("convergence failure: {0}")]
    ConvergenceError(String),
    /// A query fell outside the computed range.
    #[error("out of range: {0}")]
    RangeError(String),
}

impl LindbladError {
    pub fn domain(field: &'static str, message: impl Into<String>) -> Self {
        LindbladError::DomainError {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, LindbladError>;
