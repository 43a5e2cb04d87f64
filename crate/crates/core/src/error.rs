use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("requires truncated interval")]
    RequiresTruncatedInterval,
    #[error("invalid weight function: rho({at}) = {value}")]
    InvalidWeight { at: f64, value: f64 },
    #[error("grid mismatch")]
    GridMismatch,
    #[error("empty point list")]
    EmptyPointList,
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("complex evaluation via closed form only")]
    ComplexEvaluation,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("basis mismatch")]
    BasisMismatch,
    #[error("index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("grid too large: {nodes} nodes exceeds cap of {cap}")]
    GridTooLarge { nodes: usize, cap: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
