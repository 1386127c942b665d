use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation mismatch: n_max {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state leaks outside the declared two-qubit subspace (weight {leak:e})")]
    SupportLeak { leak: f64 },

    #[error("coherent-state embedding error {error:e} exceeds {limit:e}")]
    EmbeddingError { error: f64, limit: f64 },

    #[error("constraint set is infeasible: {0}")]
    Infeasible(String),

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },

    #[error("feasibility rate {rate:e} below {limit:e} after {attempts} attempts ({accepted} accepted)")]
    LowFeasibility {
        rate: f64,
        limit: f64,
        attempts: usize,
        accepted: usize,
    },

    #[error("eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("numerical contract violated: {invariant} ({detail})")]
    Contract { invariant: &'static str, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than a numerical
    /// contract violation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Config(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
