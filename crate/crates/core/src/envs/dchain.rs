use smallvec::smallvec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, StateId, Successors};

/// Deterministic D-chain.
///
/// States `1..=D` form the chain and state `0` is the absorbing sink. At state
/// `d`, action [`DChain::LEFT`] ends the episode with reward `(D - d) / D`;
/// [`DChain::RIGHT`] moves to `d + 1` with reward 0, except at `D` where it ends
/// the episode with reward `final_reward`.
#[derive(Debug, Clone, PartialEq)]
pub struct DChain {
    length: u64,
    final_reward: f64,
}

impl DChain {
    pub const LEFT: usize = 0;
    pub const RIGHT: usize = 1;
    pub const SINK: StateId = 0;

    pub fn new(length: u64, final_reward: f64) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidEnvironment("D-chain length must be at least 1".into()));
        }
        if !final_reward.is_finite() {
            return Err(Error::InvalidEnvironment("final reward must be finite".into()));
        }
        Ok(Self { length, final_reward })
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn final_reward(&self) -> f64 {
        self.final_reward
    }

    /// Reward of ending the episode from chain state `d`.
    pub fn left_reward(&self, d: StateId) -> f64 {
        (self.length - d) as f64 / self.length as f64
    }
}

impl Mdp for DChain {
    fn initial_state(&self) -> StateId {
        1
    }

    fn horizon(&self) -> usize {
        self.length as usize + 1
    }

    fn num_actions(&self, state: StateId) -> usize {
        if state == Self::SINK {
            0
        } else {
            2
        }
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        if action == Self::RIGHT && state < self.length {
            smallvec![(state + 1, 1.0)]
        } else {
            smallvec![(Self::SINK, 1.0)]
        }
    }

    fn reward(&self, state: StateId, action: usize, _t: usize) -> f64 {
        match action {
            Self::LEFT => self.left_reward(state),
            _ if state == self.length => self.final_reward,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{soft_value_iterate, value_iterate};

    #[test]
    fn first_branch_reward() {
        let c = DChain::new(10, 1.0).unwrap();
        assert!((c.reward(1, DChain::LEFT, 0) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn length_one_boundary() {
        let c = DChain::new(1, 0.3).unwrap();
        assert_eq!(c.reward(1, DChain::LEFT, 0), 0.0);
        assert_eq!(c.reward(1, DChain::RIGHT, 0), 0.3);
        assert_eq!(c.successors(1, DChain::RIGHT)[0].0, DChain::SINK);
    }

    #[test]
    fn rejects_zero_length() {
        assert!(DChain::new(0, 1.0).is_err());
    }

    #[test]
    fn left_reward_strictly_decreasing() {
        for d_len in 1..=32u64 {
            let c = DChain::new(d_len, 1.0).unwrap();
            for d in 1..d_len {
                assert!(c.reward(d, DChain::LEFT, 0) > c.reward(d + 1, DChain::LEFT, 0));
            }
        }
    }

    #[test]
    fn optimal_values() {
        let c = DChain::new(10, 1.0).unwrap();
        assert_eq!(value_iterate(&c).root_value(), 1.0);
        let m = DChain::new(10, 0.5).unwrap();
        let t = value_iterate(&m);
        assert!((t.root_q()[DChain::LEFT] - 0.9).abs() < 1e-15);
        // Going right still allows bailing out at state 2 for 0.8.
        assert!((t.root_q()[DChain::RIGHT] - 0.8).abs() < 1e-15);
        assert!(t.root_q()[DChain::RIGHT] < t.root_q()[DChain::LEFT]);
        assert_eq!(t.v(10, 9), Some(0.5));
        assert!((t.root_value() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn modified_chain_soft_root_value() {
        let m = DChain::new(10, 0.5).unwrap();
        let s = soft_value_iterate(&m, 1.0).unwrap();
        let expected = (0.5f64.exp() + (0..=8).map(|i| (i as f64 / 10.0).exp()).sum::<f64>()).ln();
        assert!((s.root_q()[DChain::RIGHT] - expected).abs() < 1e-12);
        assert!((s.root_q()[DChain::LEFT] - 0.9).abs() < 1e-15);
    }
}
