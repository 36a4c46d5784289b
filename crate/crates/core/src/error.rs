use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FmcError {
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("empty input")]
    Empty,
    #[error("reward components must be nonnegative, apply relativize upstream (component {index} = {value})")]
    NegativeReward { index: usize, value: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid action spec: {0}")]
    InvalidActionSpec(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("enumeration budget exceeded: {count} path-states > {budget}")]
    BudgetExceeded { count: usize, budget: usize },
    #[error("swarm already ran all {0} ticks")]
    HorizonExhausted(usize),
    #[error("no policy entry for state {0}")]
    MissingPolicyEntry(String),
    #[error("environment error: {0}")]
    Environment(String),
}

pub type Result<T, E = FmcError> = std::result::Result<T, E>;
