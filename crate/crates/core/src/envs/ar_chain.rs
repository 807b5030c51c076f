use smallvec::smallvec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, StateId, Successors};

/// Counterexample MDP for fixed-temperature average-return search.
///
/// The root (state 1) offers `a_1` (index 0), which enters a chain of
/// two-action states `2..=D`, and `a_2` (index 1), which ends the episode with
/// reward 1. In the chain, index 0 absorbs with reward 0 and index 1 continues;
/// continuing from state `D` ends the episode with reward 2. With `D = 1` the
/// chain is empty and `a_1` pays 2 immediately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArCounterexample {
    length: u64,
}

impl ArCounterexample {
    pub const ENTER: usize = 0;
    pub const BAIL: usize = 1;
    pub const ABSORB: usize = 0;
    pub const CONTINUE: usize = 1;
    pub const ROOT: StateId = 1;
    pub const SINK: StateId = 0;
    pub const FINAL_REWARD: f64 = 2.0;
    pub const BAIL_REWARD: f64 = 1.0;

    pub fn new(length: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidEnvironment("chain length must be at least 1".into()));
        }
        Ok(Self { length })
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    /// First chain state, or `None` when `D = 1`.
    pub fn chain_entry(&self) -> Option<StateId> {
        (self.length >= 2).then_some(2)
    }

    /// `2 * (e^2 / (1 + e^2))^(D - 1)`: the value the chain entry is pushed
    /// towards by a fixed unit temperature.
    pub fn fixed_temperature_bound(&self) -> f64 {
        let e2 = 2f64.exp();
        Self::FINAL_REWARD * (e2 / (1.0 + e2)).powi(self.length as i32 - 1)
    }
}

impl Mdp for ArCounterexample {
    fn initial_state(&self) -> StateId {
        Self::ROOT
    }

    fn horizon(&self) -> usize {
        self.length as usize
    }

    fn num_actions(&self, state: StateId) -> usize {
        if state == Self::SINK {
            0
        } else {
            2
        }
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        let next = if state == Self::ROOT {
            if action == Self::ENTER && self.length >= 2 {
                2
            } else {
                Self::SINK
            }
        } else if action == Self::CONTINUE && state < self.length {
            state + 1
        } else {
            Self::SINK
        };
        smallvec![(next, 1.0)]
    }

    fn reward(&self, state: StateId, action: usize, _t: usize) -> f64 {
        if state == Self::ROOT {
            match action {
                Self::BAIL => Self::BAIL_REWARD,
                _ if self.length == 1 => Self::FINAL_REWARD,
                _ => 0.0,
            }
        } else if action == Self::CONTINUE && state == self.length {
            Self::FINAL_REWARD
        } else {
            0.0
        }
    }
}
