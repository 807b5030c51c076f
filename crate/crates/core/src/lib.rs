//! Boltzmann-policy Monte-Carlo tree search: UCT, MENTS, BTS, DENTS and the
//! average-return variants, with exact oracles and benchmark environments.

pub mod alias;
pub mod config;
pub mod envs;
pub mod error;
pub mod eval;
pub mod heap;
pub mod mdp;
pub mod oracle;
pub mod policy;
pub mod schedule;
pub mod softmax;
pub mod tree;

pub use alias::{AliasTable, CachedSampler, SamplingMode};
pub use config::{Algorithm, AlgorithmConfig, BackupMode, Initializer, Recommendation, UctBias};
pub use error::{Error, Result};
pub use mdp::{Mdp, Role, StateId, Successors};
pub use oracle::{minimax_solve, soft_value_iterate, value_iterate, ValueTables};
pub use schedule::Schedule;
pub use tree::{NodeId, SearchTree, Trajectory};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG stream used by the search itself.
pub const SEARCH_STREAM: u64 = 0;
/// RNG stream used by policy evaluation.
pub const EVAL_STREAM: u64 = 1;

/// Independent ChaCha8 stream `stream` of the experiment seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
