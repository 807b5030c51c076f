use thiserror::Error;

use crate::mdp::StateId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),

    #[error("exploration coefficient must be positive and finite, got {0}")]
    InvalidExploration(f64),

    #[error("weights must be finite and non-negative with at least one positive entry")]
    InvalidWeights,

    #[error("logits must be finite")]
    NonFiniteLogits,

    #[error("invalid environment parameters: {0}")]
    InvalidEnvironment(String),

    #[error("malformed grid map: {0}")]
    MalformedMap(String),

    #[error("transition row for state {state}, action {action} sums to {sum}")]
    NonStochastic { state: StateId, action: usize, sum: f64 },

    #[error("search node for state {0} is not in the tree")]
    NotInTree(StateId),

    #[error("a node for state {state} already exists under the same parent edge")]
    DuplicateNode { state: StateId },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
