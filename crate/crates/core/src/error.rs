use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate valuation")]
    DegenerateValuation,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("isometry violated within block {block} (pair {u}, {v})")]
    IsometryViolated { block: usize, u: usize, v: usize },

    #[error("vertex set must be a nonempty proper subset of V")]
    ImproperSubset,

    #[error("{what}: budget exceeded ({needed} > {budget})")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exact rational masses required")]
    RequiresExactMasses,

    #[error("non-uniform distribution: {0}")]
    NotUniform(String),

    #[error("no feasible barycenter case")]
    NoFeasibleBarycenter,

    #[error("solver accuracy insufficient: {0}")]
    InsufficientAccuracy(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
