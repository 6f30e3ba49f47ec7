use thiserror::Error;

/// Errors raised across the geometry, expression, solver and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Induced metric failed the positive-definiteness test.
    #[error("not spacelike at {location:?}: lambda_min = {lambda_min:e}")]
    NotSpacelike { lambda_min: f64, location: Vec<f64> },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("arity mismatch: `{name}` takes 1 argument, got {got} (line {line}, column {column})")]
    Arity {
        name: String,
        got: usize,
        line: usize,
        column: usize,
    },

    /// Evaluation left the real domain of an elementary function.
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },

    #[error("grid node {index:?} is within {reach} cell(s) of the boundary")]
    BoundaryProximity { index: Vec<usize>, reach: usize },

    /// Newton could not keep the iterate spacelike with any admissible step.
    #[error("degenerate solution: {0}")]
    DegenerateSolution(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
