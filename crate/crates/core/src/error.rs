use thiserror::Error;

/// Errors raised by the geometry, forms, df and Bergman modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point, or a finite-difference stencil around it, left the field's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation produced a non-finite value or a factorization broke down.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The metric is singular (or not positive definite) at the queried point.
    #[error("singular metric: {0}")]
    SingularMetric(String),

    /// Dimensions of the inputs do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A precondition on the inputs does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Configuration failed schema validation.
    #[error("schema error: {0}")]
    Schema(String),

    /// A registry lookup failed.
    #[error("unknown registry entry: {0}")]
    UnknownRegistryEntry(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} is not finite ({v})")))
    }
}
