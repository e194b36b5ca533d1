use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested rational degree is beyond what double precision can resolve.
    #[error("rational degree k = {k} exceeds double precision for this interval; largest achievable k is {max_k}")]
    Precision { k: usize, max_k: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("continued fraction evaluated too close to a pole (level {level})")]
    PoleProximity { level: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("assembly error: {0}")]
    Assembly(String),

    /// `|delta_i|` fell below the breakdown threshold at Lanczos step `index` (1-based).
    #[error("bi-Lanczos breakdown at step {index}: |delta| = {delta_abs:e}")]
    Breakdown { index: usize, delta_abs: f64 },

    #[error("argument {re} + {im}i lies on the branch cut (-inf, 0]")]
    BranchCut { re: f64, im: f64 },

    #[error("near-defective eigenvector {index}: |s^T s| / |s|^2 = {ratio:e}")]
    NearDefective { index: usize, ratio: f64 },

    #[error("eigendecomposition failed reconstruction check: residual {residual:e}")]
    Conditioning { residual: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("stability error: {0}")]
    Stability(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Validation(_) => 4,
            _ => 3,
        }
    }
}
