use thiserror::Error;

/// Errors raised by graph construction, operator algebra and the report layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid weight {weight} on edge ({u}, {v}): weights must be finite and non-negative")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("undirected graph has asymmetric weights at ({u}, {v})")]
    Asymmetric { u: usize, v: usize },

    #[error("vertex {vertex} has zero {kind}-degree")]
    ZeroDegree { vertex: usize, kind: &'static str },

    #[error("{name}[{index}] = {value} is not allowed ({reason})")]
    InvalidParameter {
        name: &'static str,
        index: usize,
        value: f64,
        reason: &'static str,
    },

    #[error("{name} = {value} is out of range ({reason})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{operation} requires an undirected graph")]
    DirectedInput { operation: &'static str },

    #[error("graph is not connected")]
    Disconnected,

    #[error("{what} did not converge within {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },

    #[error("Perron vector is not strictly positive (reducible adjacency)")]
    Reducible,

    #[error("row {row} of the matrix sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("entry ({row}, {col}) = {value} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("entry ({row}, {col}) = {value} is positive, so the matrix is not a Z-matrix")]
    NotZMatrix { row: usize, col: usize, value: f64 },

    #[error("row {row} has zero sum, so it admits no random-walk interpretation")]
    ZeroRow { row: usize },

    #[error("step size {delta} exceeds 1/max|L_ii| = {limit}")]
    StepTooLarge { delta: f64, limit: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),

    #[error("exhaustive search is limited to {max} vertices, graph has {n}")]
    TooLarge { n: usize, max: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("CSV output is only available for vectors and edge lists, not for {0}")]
    CsvUnsupported(&'static str),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotConverged { .. } => true,
            Error::Context { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
