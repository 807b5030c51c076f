//! Named environments buildable from a config file.

use std::fmt;

use mcts_core::envs::*;
use mcts_core::mdp::Successors;
use mcts_core::oracle::optimal_root_value;
use mcts_core::{stream_rng, Algorithm, AlgorithmConfig, Mdp, Role, StateId};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LakeMap {
    #[serde(rename = "8x8")]
    Small,
    #[default]
    #[serde(rename = "8x12")]
    Train,
    #[serde(rename = "8x12-test")]
    Test,
}

impl LakeMap {
    pub fn label(self) -> &'static str {
        match self {
            LakeMap::Small => "8x8",
            LakeMap::Train => "8x12",
            LakeMap::Test => "8x12-test",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            LakeMap::Small => FROZEN_LAKE_8X8,
            LakeMap::Train => FROZEN_LAKE_8X12,
            LakeMap::Test => FROZEN_LAKE_8X12_TEST,
        }
    }
}

fn ten() -> u64 {
    10
}
fn one() -> f64 {
    1.0
}
fn lake_horizon() -> usize {
    FROZEN_LAKE_HORIZON
}
fn sailing_horizon() -> usize {
    SAILING_HORIZON
}
fn three() -> u8 {
    3
}

/// Environment name and parameters, as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    Dchain {
        #[serde(default = "ten")]
        length: u64,
        #[serde(default = "one")]
        final_reward: f64,
    },
    FrozenLake {
        #[serde(default)]
        map: LakeMap,
        #[serde(default = "lake_horizon")]
        horizon: usize,
    },
    Sailing {
        #[serde(default = "three")]
        initial_wind: u8,
        #[serde(default = "sailing_horizon")]
        horizon: usize,
    },
    ArChain {
        #[serde(default = "ten")]
        length: u64,
    },
    Tictactoe {
        /// Nine characters of `X`, `O` and `.`; empty board when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        board: Option<String>,
    },
    WideTree {
        branching: usize,
        depth: usize,
        #[serde(default)]
        seed: u64,
    },
    Random {
        #[serde(default)]
        seed: u64,
    },
}

impl Default for EnvSpec {
    fn default() -> Self {
        EnvSpec::Dchain { length: 10, final_reward: 1.0 }
    }
}

pub const ENV_NAMES: [(&str, &str); 7] = [
    ("dchain", "D-chain with a final reward (length, final_reward)"),
    ("frozen-lake", "deterministic Frozen Lake (map = 8x8 | 8x12 | 8x12-test, horizon)"),
    ("sailing", "6x6 Sailing Problem (initial_wind, horizon)"),
    ("ar-chain", "average-return counterexample chain (length)"),
    ("tictactoe", "tic-tac-toe against a minimizing opponent (board)"),
    ("wide-tree", "synthetic wide tree (branching, depth, seed)"),
    ("random", "seeded random tabular MDP (seed)"),
];

impl EnvSpec {
    pub fn build(&self) -> mcts_core::Result<Env> {
        Ok(match self {
            EnvSpec::Dchain { length, final_reward } => Env::Dchain(DChain::new(*length, *final_reward)?),
            EnvSpec::FrozenLake { map, horizon } => {
                Env::FrozenLake(FrozenLake::new(GridMap::parse(map.text())?, *horizon)?)
            }
            EnvSpec::Sailing { initial_wind, horizon } => {
                let spec = SailingSpec { initial_wind: *initial_wind, horizon: *horizon, ..SailingSpec::benchmark(0) };
                Env::Sailing(Sailing::new(spec)?)
            }
            EnvSpec::ArChain { length } => Env::ArChain(ArCounterexample::new(*length)?),
            EnvSpec::Tictactoe { board } => Env::Tictactoe(match board {
                Some(b) => TicTacToe::from_board(b)?,
                None => TicTacToe::new(),
            }),
            EnvSpec::WideTree { branching, depth, seed } => Env::WideTree(WideTree::new(*branching, *depth, *seed)?),
            EnvSpec::Random { seed } => {
                Env::Random(TabularMdp::random(RandomMdpShape::default(), &mut stream_rng(*seed, 0)))
            }
        })
    }

    /// Tuned hyperparameters for `algorithm` on this environment.
    pub fn default_config(&self, algorithm: Algorithm) -> AlgorithmConfig {
        match self {
            EnvSpec::FrozenLake { .. } => AlgorithmConfig::frozen_lake(algorithm),
            EnvSpec::Sailing { .. } => AlgorithmConfig::sailing(algorithm),
            _ => AlgorithmConfig::for_algorithm(algorithm),
        }
    }
}

impl fmt::Display for EnvSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvSpec::Dchain { length, final_reward } => write!(f, "dchain-{length}-rf{final_reward}"),
            EnvSpec::FrozenLake { map, .. } => write!(f, "frozen-lake-{}", map.label()),
            EnvSpec::Sailing { initial_wind, .. } => write!(f, "sailing-w{initial_wind}"),
            EnvSpec::ArChain { length } => write!(f, "ar-chain-{length}"),
            EnvSpec::Tictactoe { board: None } => f.write_str("tictactoe"),
            EnvSpec::Tictactoe { board: Some(b) } => write!(f, "tictactoe-{b}"),
            EnvSpec::WideTree { branching, depth, seed } => write!(f, "wide-tree-{branching}x{depth}-s{seed}"),
            EnvSpec::Random { seed } => write!(f, "random-s{seed}"),
        }
    }
}

/// Any of the bundled environments.
// One of these is built per experiment, so the Sailing variant's size is fine.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum Env {
    Dchain(DChain),
    FrozenLake(FrozenLake),
    Sailing(Sailing),
    ArChain(ArCounterexample),
    Tictactoe(TicTacToe),
    WideTree(WideTree),
    Random(TabularMdp),
}

macro_rules! each {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            Env::Dchain($m) => $body,
            Env::FrozenLake($m) => $body,
            Env::Sailing($m) => $body,
            Env::ArChain($m) => $body,
            Env::Tictactoe($m) => $body,
            Env::WideTree($m) => $body,
            Env::Random($m) => $body,
        }
    };
}

impl Env {
    /// `V*(s_0)`, or the minimax value for games.
    ///
    /// The wide tree is solved directly since enumerating it can be huge.
    pub fn optimal_value(&self) -> f64 {
        match self {
            Env::WideTree(w) => (0..w.num_leaves()).map(|i| w.leaf_reward(i)).fold(f64::NEG_INFINITY, f64::max),
            other => each!(other, m => optimal_root_value(m)),
        }
    }
}

impl Mdp for Env {
    fn initial_state(&self) -> StateId {
        each!(self, m => m.initial_state())
    }
    fn horizon(&self) -> usize {
        each!(self, m => m.horizon())
    }
    fn num_actions(&self, state: StateId) -> usize {
        each!(self, m => m.num_actions(state))
    }
    fn successors(&self, state: StateId, action: usize) -> Successors {
        each!(self, m => m.successors(state, action))
    }
    fn reward(&self, state: StateId, action: usize, t: usize) -> f64 {
        each!(self, m => m.reward(state, action, t))
    }
    fn role(&self, state: StateId) -> Role {
        each!(self, m => m.role(state))
    }
    fn is_two_player(&self) -> bool {
        each!(self, m => m.is_two_player())
    }
    fn sample_successor<R: Rng + ?Sized>(&self, state: StateId, action: usize, rng: &mut R) -> StateId {
        each!(self, m => m.sample_successor(state, action, rng))
    }
}
