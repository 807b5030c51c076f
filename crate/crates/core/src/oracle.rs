//! Exact finite-horizon dynamic programming: standard, soft and minimax values.
//!
//! Tables are keyed by `(state, t)` over everything reachable from the initial
//! state. Terminal states and states at `t == horizon` carry value 0 and no
//! Q-values.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, Role, StateId};
use crate::softmax::log_sum_exp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flavor {
    Standard,
    Soft { alpha: f64 },
    Minimax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateValues {
    pub v: f64,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ValueTables {
    flavor: Flavor,
    initial: StateId,
    horizon: usize,
    entries: HashMap<(StateId, usize), StateValues>,
}

/// Two Q-values closer than this are treated as equal by [`delta_gap`].
pub const GAP_TOL: f64 = 1e-12;

impl ValueTables {
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_state(&self) -> StateId {
        self.initial
    }

    pub fn get(&self, state: StateId, t: usize) -> Option<&StateValues> {
        self.entries.get(&(state, t))
    }

    pub fn v(&self, state: StateId, t: usize) -> Option<f64> {
        if t > self.horizon {
            return None;
        }
        self.get(state, t).map(|e| e.v)
    }

    pub fn q(&self, state: StateId, t: usize) -> Option<&[f64]> {
        self.get(state, t).map(|e| e.q.as_slice())
    }

    pub fn root_value(&self) -> f64 {
        self.entries[&(self.initial, 0)].v
    }

    pub fn root_q(&self) -> &[f64] {
        &self.entries[&(self.initial, 0)].q
    }

    /// Entries sorted by `(t, state)` for stable output.
    pub fn sorted_entries(&self) -> Vec<((StateId, usize), &StateValues)> {
        let mut out: Vec<_> = self.entries.iter().map(|(k, v)| (*k, v)).collect();
        out.sort_by_key(|((s, t), _)| (*t, *s));
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct Solver<'a, M> {
    mdp: &'a M,
    flavor: Flavor,
    memo: HashMap<(StateId, usize), StateValues>,
}

impl<M: Mdp> Solver<'_, M> {
    fn value(&mut self, s: StateId, t: usize) -> f64 {
        if let Some(e) = self.memo.get(&(s, t)) {
            return e.v;
        }
        let n = if t >= self.mdp.horizon() { 0 } else { self.mdp.num_actions(s) };
        let mut q = Vec::with_capacity(n);
        for a in 0..n {
            let mut total = self.mdp.reward(s, a, t);
            for (next, p) in self.mdp.successors(s, a) {
                if p > 0.0 {
                    total += p * self.value(next, t + 1);
                }
            }
            q.push(total);
        }
        let v = if q.is_empty() {
            0.0
        } else {
            match self.flavor {
                Flavor::Standard => max(&q),
                Flavor::Soft { alpha } => log_sum_exp(&q, alpha),
                Flavor::Minimax => match self.mdp.role(s) {
                    Role::Maximizer => max(&q),
                    Role::Minimizer => q.iter().copied().fold(f64::INFINITY, f64::min),
                },
            }
        };
        self.memo.insert((s, t), StateValues { v, q });
        v
    }
}

fn max(q: &[f64]) -> f64 {
    q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn solve<M: Mdp>(mdp: &M, flavor: Flavor) -> ValueTables {
    let mut solver = Solver { mdp, flavor, memo: HashMap::new() };
    solver.value(mdp.initial_state(), 0);
    ValueTables { flavor, initial: mdp.initial_state(), horizon: mdp.horizon(), entries: solver.memo }
}

/// Optimal standard values `V*`, `Q*` by backward induction.
pub fn value_iterate<M: Mdp>(mdp: &M) -> ValueTables {
    solve(mdp, Flavor::Standard)
}

/// Optimal soft values under the maximum-entropy objective at temperature `alpha`.
pub fn soft_value_iterate<M: Mdp>(mdp: &M, alpha: f64) -> Result<ValueTables> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidTemperature(alpha));
    }
    Ok(solve(mdp, Flavor::Soft { alpha }))
}

/// Game values: max at maximizer states, min at minimizer states.
pub fn minimax_solve<M: Mdp>(game: &M) -> ValueTables {
    solve(game, Flavor::Minimax)
}

/// The optimal value of the start state appropriate for `mdp`: minimax for
/// two-player games, standard otherwise.
pub fn optimal_root_value<M: Mdp>(mdp: &M) -> f64 {
    if mdp.is_two_player() {
        minimax_solve(mdp).root_value()
    } else {
        value_iterate(mdp).root_value()
    }
}

/// Smallest non-zero gap between Q-values of the same `(state, t)`.
///
/// Returns `f64::INFINITY` when every state has all-equal Q-values.
pub fn delta_gap(tables: &ValueTables) -> f64 {
    let mut best = f64::INFINITY;
    let mut sorted = Vec::new();
    for e in tables.entries.values() {
        sorted.clear();
        sorted.extend_from_slice(&e.q);
        sorted.sort_by(f64::total_cmp);
        for w in sorted.windows(2) {
            let gap = w[1] - w[0];
            if gap > GAP_TOL && gap < best {
                best = gap;
            }
        }
    }
    best
}

/// Lowest-index action maximising (or, at minimizer states, minimising) `q`.
pub fn argbest(q: &[f64], role: Role) -> usize {
    let sign = role.sign();
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if sign * v > sign * q[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{DChain, TabularMdp};

    #[test]
    fn zero_reward_single_state() {
        let mdp = TabularMdp::new(1, vec![vec![vec![(0, 1.0)]]], vec![vec![0.0]], 3, 0).unwrap();
        let t = value_iterate(&mdp);
        assert_eq!(t.root_value(), 0.0);
        let s = soft_value_iterate(&mdp, 0.7).unwrap();
        assert_eq!(s.root_value(), 0.0);
    }

    #[test]
    fn two_arm_soft_is_ln2() {
        let mdp =
            TabularMdp::new(2, vec![vec![vec![(1, 1.0)], vec![(1, 1.0)]], vec![]], vec![vec![0.0, 0.0], vec![]], 1, 0)
                .unwrap();
        let s = soft_value_iterate(&mdp, 1.0).unwrap();
        assert!((s.root_value() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        let chain = DChain::new(3, 1.0).unwrap();
        assert!(soft_value_iterate(&chain, 0.0).is_err());
        assert!(soft_value_iterate(&chain, -2.0).is_err());
    }

    #[test]
    fn all_equal_gap_is_infinite() {
        let mdp = TabularMdp::new(
            2,
            vec![vec![vec![(1, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)]], vec![]],
            vec![vec![0.5, 0.5, 0.5], vec![]],
            2,
            0,
        )
        .unwrap();
        assert_eq!(delta_gap(&value_iterate(&mdp)), f64::INFINITY);
    }

    #[test]
    fn argbest_breaks_ties_low() {
        assert_eq!(argbest(&[1.0, 1.0, 0.0], Role::Maximizer), 0);
        assert_eq!(argbest(&[1.0, 0.0, 0.0], Role::Minimizer), 1);
    }
}
