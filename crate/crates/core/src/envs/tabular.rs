use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{validate, Mdp, Role, StateId, Successors};

/// Explicit MDP given by transition and reward tables.
///
/// `transitions[s][a]` lists `(next, probability)`; a state with no actions is
/// terminal. Rewards do not depend on the timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    transitions: Vec<Vec<Successors>>,
    rewards: Vec<Vec<f64>>,
    roles: Option<Vec<Role>>,
    horizon: usize,
    initial: StateId,
}

/// Shape limits for [`TabularMdp::random`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomMdpShape {
    pub max_states: usize,
    pub max_horizon: usize,
    pub max_actions: usize,
    pub max_successors: usize,
}

impl Default for RandomMdpShape {
    fn default() -> Self {
        Self { max_states: 20, max_horizon: 5, max_actions: 4, max_successors: 3 }
    }
}

impl TabularMdp {
    pub fn new(
        num_states: usize,
        transitions: Vec<Vec<Vec<(StateId, f64)>>>,
        rewards: Vec<Vec<f64>>,
        horizon: usize,
        initial: StateId,
    ) -> Result<Self> {
        if transitions.len() != num_states || rewards.len() != num_states {
            return Err(Error::InvalidEnvironment(format!(
                "expected tables for {num_states} states, got {} transition rows and {} reward rows",
                transitions.len(),
                rewards.len()
            )));
        }
        if initial as usize >= num_states {
            return Err(Error::InvalidEnvironment(format!("initial state {initial} out of range")));
        }
        for (s, (row, r)) in transitions.iter().zip(&rewards).enumerate() {
            if row.len() != r.len() {
                return Err(Error::InvalidEnvironment(format!("state {s} has mismatched action counts")));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEnvironment(format!("state {s} has a non-finite reward")));
            }
            for succ in row {
                if succ.iter().any(|&(n, _)| n as usize >= num_states) {
                    return Err(Error::InvalidEnvironment(format!("state {s} has a successor out of range")));
                }
            }
        }
        let mdp = Self {
            transitions: transitions
                .into_iter()
                .map(|row| row.into_iter().map(Successors::from_vec).collect())
                .collect(),
            rewards,
            roles: None,
            horizon,
            initial,
        };
        validate(&mdp)?;
        Ok(mdp)
    }

    /// Assigns a role per state, turning the MDP into a two-player game.
    pub fn with_roles(mut self, roles: Vec<Role>) -> Result<Self> {
        if roles.len() != self.transitions.len() {
            return Err(Error::InvalidEnvironment("one role per state is required".into()));
        }
        self.roles = Some(roles);
        Ok(self)
    }

    /// Random MDP with every state non-terminal, rewards uniform in `[0, 1)` and
    /// successor probabilities drawn from a flat Dirichlet.
    pub fn random<R: Rng + ?Sized>(shape: RandomMdpShape, rng: &mut R) -> Self {
        let n = rng.random_range(2..=shape.max_states.max(2));
        let horizon = rng.random_range(1..=shape.max_horizon.max(1));
        let mut transitions = Vec::with_capacity(n);
        let mut rewards = Vec::with_capacity(n);
        for _ in 0..n {
            let actions = rng.random_range(1..=shape.max_actions.max(1));
            let mut row = Vec::with_capacity(actions);
            let mut rew = Vec::with_capacity(actions);
            for _ in 0..actions {
                let k = rng.random_range(1..=shape.max_successors.clamp(1, n));
                let targets = sample(rng, n, k);
                let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let total: f64 = raw.iter().sum();
                let mut succ: Vec<(StateId, f64)> =
                    targets.iter().zip(&raw).map(|(t, w)| (t as StateId, w / total)).collect();
                // Put the rounding residue on the last entry so rows sum to one.
                let head: f64 = succ[..k - 1].iter().map(|&(_, p)| p).sum();
                succ[k - 1].1 = 1.0 - head;
                row.push(succ);
                rew.push(rng.random::<f64>());
            }
            transitions.push(row);
            rewards.push(rew);
        }
        Self::new(n, transitions, rewards, horizon, 0).expect("generated tables are consistent")
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }
}

impl Mdp for TabularMdp {
    fn initial_state(&self) -> StateId {
        self.initial
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn num_actions(&self, state: StateId) -> usize {
        self.transitions[state as usize].len()
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        self.transitions[state as usize][action].clone()
    }

    fn reward(&self, state: StateId, action: usize, _t: usize) -> f64 {
        self.rewards[state as usize][action]
    }

    fn role(&self, state: StateId) -> Role {
        self.roles.as_ref().map_or(Role::Maximizer, |r| r[state as usize])
    }

    fn is_two_player(&self) -> bool {
        self.roles.as_ref().is_some_and(|r| r.contains(&Role::Minimizer))
    }
}
