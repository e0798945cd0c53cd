use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid direction: norm {norm} is not within 1e-6 of 1")]
    InvalidDirection { norm: f64 },

    #[error("invalid spin value {0}: expected -1 or +1")]
    InvalidSpin(i64),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("inconsistent marginals: {0}")]
    InconsistentMarginals(String),

    #[error("quasi-distribution: entry {index} is negative ({value})")]
    QuasiDistribution { index: usize, value: f64 },

    #[error("conditional undefined: conditioning probability is {0}")]
    UndefinedConditional(f64),

    #[error("invalid local model: conditional mean {0} outside [-1, 1]")]
    InvalidModel(f64),

    #[error("linear feasibility and inequality test disagree: {0}")]
    SolverDisagreement(String),
}
