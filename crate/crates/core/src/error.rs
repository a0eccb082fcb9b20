use thiserror::Error;

/// Failures surfaced by meshes, assembly, solvers and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UpgError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("quadrature failed to converge (estimated relative error {estimate:.3e})")]
    QuadratureFailure { estimate: f64 },

    #[error("singular matrix: pivot {pivot:.3e} at row {row}")]
    SingularMatrix { row: usize, pivot: f64 },

    /// Thomas elimination hit a (near) zero pivot or failed its residual check.
    /// Callers are expected to retry with dense LU.
    #[error("tridiagonal elimination unreliable at row {row}")]
    PivotBreakdown { row: usize },

    #[error("dense oracle refused: {unknowns} unknowns exceed the limit of {limit}")]
    Guardrail { unknowns: usize, limit: usize },

    #[error("bound unavailable: {0}")]
    UnavailableBound(String),
}

pub type Result<T> = std::result::Result<T, UpgError>;
