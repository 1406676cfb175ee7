use thiserror::Error;

/// Errors raised by the numerical kernel, the factorizations and the verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenInvError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("SVD did not converge after {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    /// The Hartwig-Spindelboeck decomposition needs rank(A) > 0.
    #[error("matrix is zero; rank(A) > 0 is required")]
    ZeroMatrix,

    #[error("group inverse requires index <= 1, matrix has index {index}")]
    IndexTooLarge { index: usize },

    #[error("closed form disagrees with direct computation (residual {residual:e})")]
    ClosedFormMismatch { residual: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A construction that must satisfy an identity by design did not.
    #[error("{what} fails with residual {residual:e}")]
    ResidualFailure { what: String, residual: f64 },

    #[error("unknown uniqueness system '{0}'")]
    UnknownSystem(String),

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, GenInvError>;
