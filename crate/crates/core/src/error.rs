use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("nodes {0} and {1} coincide")]
    DuplicateNode(f64, f64),
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("blending degree {d} exceeds maximum {max}")]
    DegreeOutOfRange { d: usize, max: usize },
    #[error("source and worker nodes closer than the minimum gap")]
    NodeCollision,
    #[error("point {0} coincides with an interpolation node")]
    AtNode(f64),
    #[error("node {0} is not a worker node of this code")]
    UnknownNode(f64),
    #[error("insufficient results: need {needed}, got {got}")]
    InsufficientResults { needed: usize, got: usize },
    #[error("task requires an auxiliary vector")]
    MissingAux,
    #[error("task does not take an auxiliary vector")]
    UnexpectedAux,
    #[error("theorem hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate quantity: {0}")]
    Degenerate(&'static str),
}
