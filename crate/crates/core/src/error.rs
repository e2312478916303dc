use thiserror::Error;

/// Errors raised anywhere in the matching pipeline.
///
/// Variants are grouped by the exit code the command-line front end maps them to:
/// input problems (2), algorithm preconditions (3) and numerical failures (4).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0} but loops are disabled")]
    LoopNotAllowed(usize),
    #[error("conflicting weights for edge ({row}, {col}): {first} vs {second}")]
    ConflictingWeight {
        row: usize,
        col: usize,
        first: f64,
        second: f64,
    },
    #[error("non-finite value {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("duplicate seed index {index} on side {side}")]
    DuplicateSeed { side: char, index: usize },
    #[error("correspondence is not injective: vertex {index} appears twice on side {side}")]
    NotInjective { side: char, index: usize },
    #[error("seed pair ({0}, {1}) is missing from the correspondence")]
    SeedMissing(usize, usize),
    #[error("no perfect matching exists on the stored entries of the sparse cost matrix (row {0} cannot be assigned); use the dense solver")]
    Infeasible(usize),
    #[error("infeasible model parameters: {0}")]
    InfeasibleParameters(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::Precondition(_) => 3,
            Error::Numerical(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
