//! Finite-horizon MDP abstraction.
//!
//! States are opaque integer identifiers chosen by each environment. Time is
//! tracked explicitly by callers: a state reached after `horizon()` decisions
//! is terminal regardless of what the environment reports.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type StateId = u64;

/// Successor distribution of a state-action pair: `(next_state, probability)`.
pub type Successors = SmallVec<[(StateId, f64); 4]>;

/// Which side of a zero-sum game acts at a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Role {
    Maximizer,
    Minimizer,
}

impl Role {
    /// `+1` for the maximizer, `-1` for the minimizer.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Role::Maximizer => 1.0,
            Role::Minimizer => -1.0,
        }
    }
}

/// A finite-horizon MDP `(S, A, p, R, H)`.
///
/// Actions are indexed `0..num_actions(state)`; a state with zero actions is
/// terminal (absorbing with zero reward).
pub trait Mdp {
    fn initial_state(&self) -> StateId;

    /// Maximum number of decisions in an episode.
    fn horizon(&self) -> usize;

    fn num_actions(&self, state: StateId) -> usize;

    fn successors(&self, state: StateId, action: usize) -> Successors;

    /// Reward for taking `action` at `state` as the decision made at timestep `t`
    /// (`t = 0` is the first decision).
    fn reward(&self, state: StateId, action: usize, t: usize) -> f64;

    fn role(&self, _state: StateId) -> Role {
        Role::Maximizer
    }

    /// Whether any state is controlled by a minimizing opponent.
    fn is_two_player(&self) -> bool {
        false
    }

    fn sample_successor<R: Rng + ?Sized>(&self, state: StateId, action: usize, rng: &mut R) -> StateId {
        let succ = self.successors(state, action);
        if succ.len() == 1 {
            return succ[0].0;
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(next, p) in &succ {
            acc += p;
            if u < acc {
                return next;
            }
        }
        succ.last().expect("non-terminal state-action has successors").0
    }
}

impl<M: Mdp + ?Sized> Mdp for &M {
    fn initial_state(&self) -> StateId {
        (**self).initial_state()
    }
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn num_actions(&self, state: StateId) -> usize {
        (**self).num_actions(state)
    }
    fn successors(&self, state: StateId, action: usize) -> Successors {
        (**self).successors(state, action)
    }
    fn reward(&self, state: StateId, action: usize, t: usize) -> f64 {
        (**self).reward(state, action, t)
    }
    fn role(&self, state: StateId) -> Role {
        (**self).role(state)
    }
    fn is_two_player(&self) -> bool {
        (**self).is_two_player()
    }
    fn sample_successor<R: Rng + ?Sized>(&self, state: StateId, action: usize, rng: &mut R) -> StateId {
        (**self).sample_successor(state, action, rng)
    }
}

/// Tolerance on the sum of a transition row.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// All `(state, t)` pairs reachable from the initial state with `t < horizon`
/// and at least one action, in breadth-first order.
pub fn reachable_decisions<M: Mdp + ?Sized>(mdp: &M) -> Vec<(StateId, usize)> {
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let start = (mdp.initial_state(), 0usize);
    seen.insert(start);
    queue.push_back(start);
    while let Some((s, t)) = queue.pop_front() {
        if t >= mdp.horizon() || mdp.num_actions(s) == 0 {
            continue;
        }
        order.push((s, t));
        for a in 0..mdp.num_actions(s) {
            for (next, p) in mdp.successors(s, a) {
                if p > 0.0 && seen.insert((next, t + 1)) {
                    queue.push_back((next, t + 1));
                }
            }
        }
    }
    order
}

/// Checks that every reachable state-action pair has a non-empty successor
/// list with non-negative probabilities summing to one.
pub fn validate<M: Mdp + ?Sized>(mdp: &M) -> Result<()> {
    if mdp.horizon() == 0 {
        return Err(Error::InvalidEnvironment("horizon must be at least 1".into()));
    }
    let mut checked = HashSet::new();
    for (s, _) in reachable_decisions(mdp) {
        if !checked.insert(s) {
            continue;
        }
        for a in 0..mdp.num_actions(s) {
            let succ = mdp.successors(s, a);
            let sum: f64 = succ.iter().map(|&(_, p)| p).sum();
            let negative = succ.iter().any(|&(_, p)| p.is_nan() || p < 0.0);
            if succ.is_empty() || negative || (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NonStochastic { state: s, action: a, sum });
            }
        }
    }
    Ok(())
}
