use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum LansError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("time grid mismatch between trajectories")]
    TimeGridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field is not divergence-free (relative residual {0:e})")]
    NotDivergenceFree(f64),
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("Picard iteration is not contracting (ratios {ratios:?} at iteration {iteration})")]
    NonContraction { iteration: usize, ratios: Vec<f64> },
    #[error("Picard iterate diverged at iteration {0}")]
    Divergence(usize),
    #[error("blow-up detected at t = {last_good_time} ({reason})")]
    BlowupDetected { last_good_time: f64, reason: String },
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("checkpoint format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LansError>;
