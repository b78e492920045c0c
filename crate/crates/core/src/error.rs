use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible graph: {0}")]
    InfeasibleGraph(String),
    #[error("random regular pairing did not produce a simple graph after {restarts} restarts")]
    NoConvergence { restarts: usize },
    #[error("lattice with side {side} and dimension {dim} exceeds the vertex limit {limit}")]
    LatticeTooLarge { dim: usize, side: usize, limit: usize },
    #[error("graph has no edges; mean-field scaling divides by the average degree")]
    EmptyGraph,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exact enumeration is limited to n <= {cap}, got n = {n}")]
    SizeCap { n: usize, cap: usize },
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid signal class: {0}")]
    InvalidClass(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("conditioning event was not reached after {attempts} candidate samples")]
    Conditioning { attempts: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("sweep cell {cell}: {source}")]
    Cell { cell: usize, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
