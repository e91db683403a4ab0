use thiserror::Error;

/// Errors raised by the frame-space operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("invalid {what}: {reason}")]
    InvalidInput { what: &'static str, reason: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("not a frame: columns do not span (smallest eigenvalue {0:e})")]
    NotAFrame(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search too large: {0}")]
    SearchTooLarge(String),

    #[error("polytope is infeasible")]
    Infeasible,

    #[error("no interior: {0}")]
    NoInterior(String),

    #[error("start point is not strictly feasible (min slack {0:e})")]
    InfeasibleStart(f64),

    #[error("degenerate eigensteps: {0}")]
    DegenerateEigensteps(String),

    #[error("inconsistent table: {0}")]
    InconsistentTable(String),

    #[error("degenerate action at (k={k}, j={j}): eigenvalue gap {gap:e}")]
    DegenerateAction { k: usize, j: usize, gap: f64 },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, FrameError>;

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> FrameError {
    FrameError::InvalidInput {
        what,
        reason: reason.into(),
    }
}
