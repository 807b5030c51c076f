use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::smallvec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, StateId, Successors};

#[derive(Debug, Clone)]
enum LeafRewards {
    Seeded(Box<ChaCha8Rng>),
    Explicit(Vec<f64>),
}

/// Deterministic `A`-ary tree of depth `d` with rewards only on the final move.
///
/// Nodes are numbered heap-style: the root is 0 and child `a` of node `n` is
/// `n * A + a + 1`. Leaf rewards lie in `[0, 1)`; seeded rewards are read from
/// a counter-based stream so each leaf is computed on demand.
#[derive(Debug, Clone)]
pub struct WideTree {
    branching: u64,
    depth: usize,
    first_leaf: u64,
    rewards: LeafRewards,
}

impl WideTree {
    pub fn new(branching: usize, depth: usize, seed: u64) -> Result<Self> {
        Self::check(branching, depth)?;
        Ok(Self::build(branching, depth, LeafRewards::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))))
    }

    pub fn with_rewards(branching: usize, depth: usize, rewards: Vec<f64>) -> Result<Self> {
        Self::check(branching, depth)?;
        let expected = (branching as u64).checked_pow(depth as u32);
        if expected != Some(rewards.len() as u64) {
            return Err(Error::InvalidEnvironment(format!(
                "expected {branching}^{depth} leaf rewards, got {}",
                rewards.len()
            )));
        }
        if rewards.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidEnvironment("leaf rewards must be finite".into()));
        }
        Ok(Self::build(branching, depth, LeafRewards::Explicit(rewards)))
    }

    fn check(branching: usize, depth: usize) -> Result<()> {
        if branching < 2 || depth < 1 {
            return Err(Error::InvalidEnvironment("wide tree needs branching >= 2 and depth >= 1".into()));
        }
        let leaves = (branching as u64).checked_pow(depth as u32 + 1);
        if leaves.is_none() {
            return Err(Error::InvalidEnvironment("wide tree is too large to index".into()));
        }
        Ok(())
    }

    fn build(branching: usize, depth: usize, rewards: LeafRewards) -> Self {
        let a = branching as u64;
        Self { branching: a, depth, first_leaf: (a.pow(depth as u32) - 1) / (a - 1), rewards }
    }

    pub fn branching(&self) -> usize {
        self.branching as usize
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of non-leaf nodes, `1 + A + ... + A^(d-1)`.
    pub fn interior_nodes(&self) -> u64 {
        self.first_leaf
    }

    pub fn num_leaves(&self) -> u64 {
        self.branching.pow(self.depth as u32)
    }

    pub fn leaf_reward(&self, leaf: u64) -> f64 {
        match &self.rewards {
            LeafRewards::Explicit(r) => r[leaf as usize],
            LeafRewards::Seeded(base) => {
                let mut rng = base.clone();
                rng.set_word_pos(leaf as u128 * 2);
                (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
            }
        }
    }

    fn child(&self, state: StateId, action: usize) -> StateId {
        state * self.branching + action as u64 + 1
    }
}

impl Mdp for WideTree {
    fn initial_state(&self) -> StateId {
        0
    }

    fn horizon(&self) -> usize {
        self.depth
    }

    fn num_actions(&self, state: StateId) -> usize {
        if state >= self.first_leaf {
            0
        } else {
            self.branching as usize
        }
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        smallvec![(self.child(state, action), 1.0)]
    }

    fn reward(&self, state: StateId, action: usize, _t: usize) -> f64 {
        let next = self.child(state, action);
        if next >= self.first_leaf {
            self.leaf_reward(next - self.first_leaf)
        } else {
            0.0
        }
    }
}
