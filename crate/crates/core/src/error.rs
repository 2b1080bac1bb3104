use thiserror::Error;

/// Errors produced by simulation, sampling, statistics and assertion evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// An expected cell count was zero or negative, so the chi-square
    /// statistic (which divides by it) is undefined.
    #[error(
        "chi-square statistic undefined: expected count {value} at cell {cell} is not positive (division by zero)"
    )]
    InvalidExpected { cell: usize, value: f64 },

    #[error(
        "too few shots: expected count per category is {expected:.3} (< 1); at least {required} shots are required"
    )]
    InfeasibleShots { expected: f64, required: u64 },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
