use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m - m*| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix has no entries")]
    EmptyMatrix,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid measure space: {0}")]
    InvalidMeasure(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid interval [{a}, {b}] with {m} points")]
    InvalidInterval { a: f64, b: f64, m: usize },

    #[error("family is not a frame: lower bound {lower:e} is within tolerance of zero")]
    NotAFrame { lower: f64 },

    #[error("families live on different measure spaces or dimensions: {0}")]
    SpaceMismatch(String),

    #[error("label {0:?} is not a point of the measure space")]
    UnknownLabel(String),

    #[error(
        "biorthogonal system is infeasible at index {index} (label {label:?}): \
         vector lies in the span of the others, residual {residual:e}"
    )]
    Infeasible { index: usize, label: String, residual: f64 },

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("scenario parameter n = {0} is too small (need n >= 3)")]
    BadDimension(usize),

    #[error("frame file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
