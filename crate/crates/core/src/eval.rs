//! Policy evaluation and learning curves.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::AlgorithmConfig;
use crate::error::{Error, Result};
use crate::mdp::{Mdp, StateId};
use crate::oracle::{argbest, ValueTables};
use crate::tree::{NodeId, SearchTree, ROOT};
use crate::{stream_rng, EVAL_STREAM, SEARCH_STREAM};

/// A policy that can be rolled out for evaluation.
///
/// `reset` is called at the start of every episode and `observe` after every
/// transition, so implementations may track where they are.
pub trait EvalPolicy {
    fn reset(&mut self) {}

    fn act<R: Rng + ?Sized>(&mut self, state: StateId, t: usize, num_actions: usize, rng: &mut R) -> usize;

    fn observe(&mut self, _action: usize, _next_state: StateId) {}
}

/// Uniformly random actions everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformPolicy;

impl EvalPolicy for UniformPolicy {
    fn act<R: Rng + ?Sized>(&mut self, _state: StateId, _t: usize, num_actions: usize, rng: &mut R) -> usize {
        rng.random_range(0..num_actions)
    }
}

/// Acts greedily with respect to oracle Q-values (argmin for the opponent).
#[derive(Debug, Clone)]
pub struct GreedyPolicy<'a, M> {
    tables: &'a ValueTables,
    mdp: &'a M,
}

impl<'a, M: Mdp> GreedyPolicy<'a, M> {
    pub fn new(tables: &'a ValueTables, mdp: &'a M) -> Self {
        Self { tables, mdp }
    }
}

impl<M: Mdp> EvalPolicy for GreedyPolicy<'_, M> {
    fn act<R: Rng + ?Sized>(&mut self, state: StateId, t: usize, _num_actions: usize, _rng: &mut R) -> usize {
        let q = self.tables.q(state, t).expect("reachable states are tabulated");
        argbest(q, self.mdp.role(state))
    }
}

/// The search tree's recommendation inside the tree and uniform outside it.
#[derive(Debug, Clone)]
pub struct CompletedPolicy<'a> {
    tree: &'a SearchTree,
    cursor: Option<NodeId>,
}

impl<'a> CompletedPolicy<'a> {
    pub fn new(tree: &'a SearchTree) -> Self {
        Self { tree, cursor: Some(ROOT) }
    }

    /// Probability the completed policy assigns to `action` at the cursor.
    pub fn probability(&self, action: usize, num_actions: usize) -> f64 {
        match self.cursor.and_then(|id| self.tree.recommend(id)) {
            Some(a) => f64::from(u8::from(a == action)),
            None => 1.0 / num_actions as f64,
        }
    }

    pub fn in_tree(&self) -> bool {
        self.cursor.is_some()
    }
}

impl EvalPolicy for CompletedPolicy<'_> {
    fn reset(&mut self) {
        self.cursor = Some(ROOT);
    }

    fn act<R: Rng + ?Sized>(&mut self, _state: StateId, _t: usize, num_actions: usize, rng: &mut R) -> usize {
        match self.cursor.and_then(|id| self.tree.recommend(id)) {
            Some(a) => a,
            None => rng.random_range(0..num_actions),
        }
    }

    fn observe(&mut self, action: usize, next_state: StateId) {
        self.cursor = self.cursor.and_then(|id| {
            let node = self.tree.node(id);
            (action < node.num_actions()).then(|| node.child(action, next_state)).flatten()
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub std_dev: f64,
    pub n: u64,
}

/// Monte-Carlo estimate of the policy's value at the initial state.
pub fn evaluate_policy<M: Mdp, P: EvalPolicy, R: Rng + ?Sized>(
    policy: &mut P,
    mdp: &M,
    n_traj: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if n_traj == 0 {
        return Err(Error::InvalidConfig("at least one evaluation trajectory is needed".into()));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 1..=n_traj {
        let ret = episode(policy, mdp, rng);
        let delta = ret - mean;
        mean += delta / i as f64;
        m2 += delta * (ret - mean);
    }
    let var = if n_traj > 1 { m2 / (n_traj - 1) as f64 } else { 0.0 };
    let std_dev = var.max(0.0).sqrt();
    Ok(Estimate { mean, std_err: std_dev / (n_traj as f64).sqrt(), std_dev, n: n_traj })
}

fn episode<M: Mdp, P: EvalPolicy, R: Rng + ?Sized>(policy: &mut P, mdp: &M, rng: &mut R) -> f64 {
    policy.reset();
    let mut state = mdp.initial_state();
    let mut total = 0.0;
    for t in 0..mdp.horizon() {
        let n = mdp.num_actions(state);
        if n == 0 {
            break;
        }
        let a = policy.act(state, t, n, rng);
        total += mdp.reward(state, a, t);
        let next = mdp.sample_successor(state, a, rng);
        policy.observe(a, next);
        state = next;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regret {
    pub raw: f64,
    pub clamped: f64,
}

/// `oracle - estimate`; the raw value goes negative under evaluation noise.
pub fn simple_regret(estimate: f64, oracle_v: f64) -> Regret {
    let raw = oracle_v - estimate;
    Regret { raw, clamped: raw.max(0.0) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub total_trials: u64,
    pub checkpoint_every: u64,
    pub eval_trajectories: u64,
    pub seed: u64,
    /// When false, timing fields are reported as zero so reports are reproducible.
    pub record_timing: bool,
}

impl Default for CurveSpec {
    fn default() -> Self {
        Self { total_trials: 5000, checkpoint_every: 250, eval_trajectories: 250, seed: 0, record_timing: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n_trials: u64,
    pub est_value: f64,
    pub std_err: f64,
    pub std_dev: f64,
    pub simple_regret: f64,
    pub simple_regret_clamped: f64,
    pub wallclock_ns: u64,
    pub trials_per_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub algorithm: String,
    pub env: String,
    pub seed: u64,
    pub eval_trajectories: u64,
    pub checkpoints: Vec<Checkpoint>,
}

/// Trial counts at which a curve is evaluated.
pub fn checkpoint_schedule(total: u64, every: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=total / every).map(|k| k * every).collect();
    if !total.is_multiple_of(every) {
        out.push(total);
    }
    out
}

/// Searches for `spec.total_trials` trials, evaluating the completed policy
/// at each checkpoint. Search uses stream 0 of the seed and evaluation stream 1.
pub fn run_learning_curve<M: Mdp>(
    mdp: &M,
    cfg: AlgorithmConfig,
    spec: &CurveSpec,
    oracle_v: f64,
    env: &str,
    mut on_checkpoint: impl FnMut(&Checkpoint),
) -> Result<EvalReport> {
    if spec.total_trials == 0 || spec.checkpoint_every == 0 || spec.eval_trajectories == 0 {
        return Err(Error::InvalidConfig(
            "trial budget, checkpoint cadence and evaluation count must be positive".into(),
        ));
    }
    let mut tree = SearchTree::new(mdp, cfg)?;
    let mut search_rng = stream_rng(spec.seed, SEARCH_STREAM);
    let mut eval_rng = stream_rng(spec.seed, EVAL_STREAM);
    let mut elapsed_ns: u64 = 0;
    let mut done = 0;
    let mut checkpoints = Vec::new();
    for n in checkpoint_schedule(spec.total_trials, spec.checkpoint_every) {
        let start = Instant::now();
        tree.run(mdp, n - done, &mut search_rng);
        elapsed_ns += start.elapsed().as_nanos() as u64;
        done = n;
        let est = evaluate_policy(&mut CompletedPolicy::new(&tree), mdp, spec.eval_trajectories, &mut eval_rng)?;
        let regret = simple_regret(est.mean, oracle_v);
        let (wallclock_ns, trials_per_sec) =
            if spec.record_timing { (elapsed_ns, n as f64 / (elapsed_ns.max(1) as f64 * 1e-9)) } else { (0, 0.0) };
        let cp = Checkpoint {
            n_trials: n,
            est_value: est.mean,
            std_err: est.std_err,
            std_dev: est.std_dev,
            simple_regret: regret.raw,
            simple_regret_clamped: regret.clamped,
            wallclock_ns,
            trials_per_sec,
        };
        on_checkpoint(&cp);
        checkpoints.push(cp);
    }
    Ok(EvalReport {
        algorithm: cfg.algorithm.name().to_string(),
        env: env.to_string(),
        seed: spec.seed,
        eval_trajectories: spec.eval_trajectories,
        checkpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::DChain;
    use crate::oracle::value_iterate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn optimal_chain_policy_is_exact() {
        let chain = DChain::new(10, 1.0).unwrap();
        let t = value_iterate(&chain);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let est = evaluate_policy(&mut GreedyPolicy::new(&t, &chain), &chain, 100, &mut rng).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_dev, 0.0);
    }

    #[test]
    fn regret_arithmetic() {
        let r = simple_regret(0.5, 0.9);
        assert!((r.raw - 0.4).abs() < 1e-15);
        assert_eq!(simple_regret(0.9, 0.9).raw, 0.0);
        assert_eq!(simple_regret(1.0, 0.9).clamped, 0.0);
        assert!(simple_regret(1.0, 0.9).raw < 0.0);
    }

    #[test]
    fn four_checkpoints() {
        assert_eq!(checkpoint_schedule(1000, 250), vec![250, 500, 750, 1000]);
        assert_eq!(checkpoint_schedule(600, 250), vec![250, 500, 600]);
    }

    #[test]
    fn root_only_tree_completes_uniformly() {
        let chain = DChain::new(3, 1.0).unwrap();
        let tree = SearchTree::new(&chain, AlgorithmConfig::bts(1.0, 1.0)).unwrap();
        let mut p = CompletedPolicy::new(&tree);
        assert_eq!(p.probability(0, 2), 1.0);
        p.observe(0, DChain::SINK);
        assert!(!p.in_tree());
        assert_eq!(p.probability(1, 2), 0.5);
    }

    #[test]
    fn curve_is_deterministic_without_timing() {
        let chain = DChain::new(5, 1.0).unwrap();
        let spec = CurveSpec {
            total_trials: 1000,
            checkpoint_every: 250,
            eval_trajectories: 50,
            seed: 3,
            record_timing: false,
        };
        let cfg = AlgorithmConfig::bts(1.0, 1.0);
        let a = run_learning_curve(&chain, cfg, &spec, 1.0, "chain", |_| {}).unwrap();
        let b = run_learning_curve(&chain, cfg, &spec, 1.0, "chain", |_| {}).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.checkpoints.len(), 4);
    }
}
