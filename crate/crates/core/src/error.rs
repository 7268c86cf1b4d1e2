use thiserror::Error;

/// Errors produced by the model, metrics and optimizer layers.
///
/// `UnsupportedCombination` is currently unreachable from the public API:
/// every scheme/regime pair handed to the asymptote evaluator resolves to a
/// printed formula (the dispersive and arm-and-release long-time forms are
/// documented as identical). The variant is kept so callers can match on it
/// if a future scheme lacks a closed asymptote.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An input violates a documented invariant; names the offending field.
    #[error("domain error in `{field}`: {message}")]
    DomainError { field: &'static str, message: String },

    /// Adaptive step control failed to reach the requested local tolerance.
    #[error("integration error: {0}")]
    IntegrationError(String),

    /// An argument lies outside the tabulated or supported range.
    #[error("range error: {0}")]
    RangeError(String),

    /// An iterative solve (bisection, bracket expansion) did not converge.
    #[error("convergence error: {0}")]
    ConvergenceError(String),

    /// Adaptive quadrature could not meet its error target.
    #[error("quadrature error: {0}")]
    QuadratureError(String),

    /// A sampled grid is too coarse for the requested accuracy.
    #[error("resolution error: {0}")]
    ResolutionError(String),

    /// No printed formula covers the requested scheme/regime pair.
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
}

impl CoreError {
    pub(crate) fn domain(field: &'static str, message: impl Into<String>) -> Self {
        CoreError::DomainError {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
