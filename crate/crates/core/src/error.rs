use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PaoError {
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),
    #[error("insufficient population: {what} needs at least {needed} individuals, got {got}")]
    InsufficientPopulation {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("objective returned a non-finite value at {0:?}")]
    ObjectiveEvaluation(Vec<f64>),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("invalid dimension {dim} for {problem}")]
    InvalidDimension { problem: String, dim: usize },
    #[error("unknown optimizer `{0}`")]
    UnknownOptimizer(String),
    #[error("unknown attractor kind `{0}`")]
    UnknownAttractor(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("records have mismatched horizons: expected {expected} entries, found {found}")]
    MismatchedHorizons { expected: usize, found: usize },
    #[error("io failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for PaoError {
    fn from(e: std::io::Error) -> Self {
        PaoError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for PaoError {
    fn from(e: serde_json::Error) -> Self {
        PaoError::Io(e.to_string())
    }
}

pub type Result<T, E = PaoError> = std::result::Result<T, E>;
