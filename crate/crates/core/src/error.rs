use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid sampling set: {0}")]
    InvalidSamplingSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("undefined separation: need at least two points, got {0}")]
    UndefinedSeparation(usize),

    #[error("empty quadrature grid: no node of the {0}-node ambient grid lies in the spectrum")]
    EmptyGrid(usize),

    #[error("grid mismatch: signals live on different spectral grids")]
    GridMismatch,

    #[error("grid is not nested: {0}")]
    NotNested(String),

    #[error("capacity exceeded: {what} has size {size}, limit is {limit}")]
    Capacity { what: &'static str, size: usize, limit: usize },

    #[error("balayage infeasible at tolerance {tolerance:e} for y = {y:?}: residual {residual:e}")]
    Infeasible { y: Vec<f64>, residual: f64, tolerance: f64 },

    #[error("not a frame at this scale: lower bound {lower:e}, condition {condition:e}")]
    NotAFrame { lower: f64, condition: f64 },

    #[error("incommensurate grids: {0}")]
    Incommensurate(String),

    #[error("symbol class violation: {0}")]
    SymbolClass(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
