//! Search tree and the two-phase trial.
//!
//! Nodes live in an arena and are keyed by the path that reached them, so a
//! state visited along two different paths gets two nodes. Visit counts are
//! bumped on arrival; policies read the count from before the current trial.

use rand::{Rng, RngCore};
use smallvec::SmallVec;

use crate::alias::CachedSampler;
use crate::config::{Algorithm, AlgorithmConfig, BackupMode, Initializer, Recommendation, UctBias};
use crate::error::{Error, Result};
use crate::heap::IndexedMaxHeap;
use crate::mdp::{Mdp, Role, StateId};
use crate::oracle::argbest;
use crate::policy::{search_policy, uct_bias, uct_select, PolicyInputs};
use crate::softmax::entropy;

pub type NodeId = u32;

pub const ROOT: NodeId = 0;

/// Relative rounding budget of the incremental soft backup before it falls
/// back to a full recomputation.
const SOFT_REL_TOL: f64 = 1e-12;

/// Link from an edge to one of its sampled successors.
#[derive(Debug, Clone)]
pub struct Child {
    pub state: StateId,
    pub node: NodeId,
    // Child values at the previous backup through this link.
    v_seen: f64,
    sft_seen: f64,
    h_seen: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct SoftAux {
    m: f64,
    e: f64,
    err: f64,
    valid: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct EntropyAux {
    own: f64,
    mix: f64,
}

#[derive(Debug, Clone)]
pub struct Node {
    state: StateId,
    depth: usize,
    role: Role,
    visits: u64,
    n_sa: Vec<u64>,
    rewards: Vec<f64>,
    children: Vec<SmallVec<[Child; 1]>>,
    q_bar: Vec<f64>,
    q_hat: Vec<f64>,
    q_sft: Vec<f64>,
    h_q: Vec<f64>,
    // Unnormalised sum of N(s') * value(s') per edge: Bellman, soft, entropy.
    sums: Vec<[f64; 3]>,
    v_bar: f64,
    v_hat: f64,
    v_sft: f64,
    h_v: f64,
    heap: Option<IndexedMaxHeap>,
    soft: SoftAux,
    ent: EntropyAux,
    sampler: CachedSampler,
}

impl Node {
    pub fn state(&self) -> StateId {
        self.state
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn num_actions(&self) -> usize {
        self.n_sa.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.n_sa.is_empty()
    }

    pub fn action_visits(&self) -> &[u64] {
        &self.n_sa
    }

    pub fn q_bar(&self) -> &[f64] {
        &self.q_bar
    }

    /// Bellman estimates; empty unless the algorithm backs them up.
    pub fn q_hat(&self) -> &[f64] {
        &self.q_hat
    }

    /// Soft estimates; empty unless the algorithm backs them up.
    pub fn q_sft(&self) -> &[f64] {
        &self.q_sft
    }

    /// Entropy values; empty unless the algorithm backs them up.
    pub fn h_q(&self) -> &[f64] {
        &self.h_q
    }

    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }

    pub fn v_hat(&self) -> f64 {
        self.v_hat
    }

    pub fn v_sft(&self) -> f64 {
        self.v_sft
    }

    pub fn h_v(&self) -> f64 {
        self.h_v
    }

    /// Stable-softmax auxiliaries `(M, E)` of the incremental soft backup.
    pub fn soft_aux(&self) -> Option<(f64, f64)> {
        self.soft.valid.then_some((self.soft.m, self.soft.e))
    }

    /// Heap maximum over role-signed Bellman estimates, when maintained.
    pub fn heap_max(&self) -> Option<f64> {
        self.heap.as_ref().map(|h| h.max())
    }

    pub fn sampler(&self) -> &CachedSampler {
        &self.sampler
    }

    pub fn children(&self, action: usize) -> impl Iterator<Item = (StateId, NodeId)> + '_ {
        self.children[action].iter().map(|c| (c.state, c.node))
    }

    pub fn child(&self, action: usize, state: StateId) -> Option<NodeId> {
        self.children[action].iter().find(|c| c.state == state).map(|c| c.node)
    }

    fn inputs(&self, visits: u64) -> PolicyInputs<'_> {
        PolicyInputs {
            role: self.role,
            visits,
            q_hat: &self.q_hat,
            q_sft: &self.q_sft,
            q_bar: &self.q_bar,
            h_q: &self.h_q,
        }
    }
}

/// One decision of a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub node: NodeId,
    pub state: StateId,
    pub action: usize,
    pub reward: f64,
    pub next_state: StateId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// Value the final node contributed to the return.
    pub leaf_value: f64,
    /// Whether the trial added a node.
    pub expanded: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Return from the first decision: rewards plus the leaf value.
    pub fn total_return(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum::<f64>() + self.leaf_value
    }
}

#[derive(Debug, Clone)]
pub struct SearchTree {
    cfg: AlgorithmConfig,
    horizon: usize,
    nodes: Vec<Node>,
    trials: u64,
    scratch: Vec<f64>,
}

enum Chooser<'a, R> {
    Sample(&'a mut R),
    Replay(&'a mut R, std::slice::Iter<'a, Step>),
}

impl SearchTree {
    pub fn new<M: Mdp>(mdp: &M, cfg: AlgorithmConfig) -> Result<Self> {
        cfg.validate()?;
        if mdp.horizon() == 0 {
            return Err(Error::InvalidEnvironment("horizon must be at least 1".into()));
        }
        let mut tree = Self { cfg, horizon: mdp.horizon(), nodes: Vec::new(), trials: 0, scratch: Vec::new() };
        let root = tree.make_node(mdp, mdp.initial_state(), 0, 0, None);
        tree.nodes.push(root);
        Ok(tree)
    }

    pub fn config(&self) -> &AlgorithmConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[ROOT as usize]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (i as NodeId, n))
    }

    /// Node reached from the root by the `(action, next_state)` path.
    pub fn find(&self, path: &[(usize, StateId)]) -> Result<NodeId> {
        let mut id = ROOT;
        for &(a, s) in path {
            let node = self.node(id);
            id = (a < node.num_actions()).then(|| node.child(a, s)).flatten().ok_or(Error::NotInTree(s))?;
        }
        Ok(id)
    }

    /// The current (not the frozen) search policy at `id`.
    pub fn policy(&self, id: NodeId) -> Vec<f64> {
        let node = self.node(id);
        let mut out = Vec::new();
        if !node.is_terminal() {
            search_policy(&self.cfg, &node.inputs(self.pre_visits(node)), &mut out);
        }
        out
    }

    fn pre_visits(&self, node: &Node) -> u64 {
        node.visits.saturating_sub(1)
    }

    /// Recommended action at `id`, or `None` at a terminal node.
    pub fn recommend(&self, id: NodeId) -> Option<usize> {
        let node = self.node(id);
        if node.is_terminal() {
            return None;
        }
        if self.cfg.recommendation == Recommendation::MostVisited {
            let counts: Vec<f64> = node.n_sa.iter().map(|&n| n as f64).collect();
            return Some(argbest(&counts, Role::Maximizer));
        }
        let table = match self.cfg.algorithm {
            Algorithm::Ments => &node.q_sft,
            Algorithm::Bts | Algorithm::Dents => &node.q_hat,
            _ => &node.q_bar,
        };
        Some(argbest(table, node.role))
    }

    pub fn recommend_root(&self) -> Option<usize> {
        self.recommend(ROOT)
    }

    /// Recommendation at the node reached by `path`.
    pub fn recommend_at(&self, path: &[(usize, StateId)]) -> Result<Option<usize>> {
        Ok(self.recommend(self.find(path)?))
    }

    /// Runs one selection/expansion phase followed by the backup.
    pub fn run_trial<M: Mdp, R: Rng>(&mut self, mdp: &M, rng: &mut R) -> Trajectory {
        self.trial(mdp, Chooser::Sample(rng))
    }

    /// Re-applies a trajectory recorded from another tree over the same MDP,
    /// following its actions and successors instead of sampling.
    ///
    /// `rng` is only consumed by rollout initializers.
    pub fn replay_trial<M: Mdp, R: Rng>(&mut self, mdp: &M, traj: &Trajectory, rng: &mut R) -> Trajectory {
        self.trial(mdp, Chooser::Replay(rng, traj.steps.iter()))
    }

    pub fn run<M: Mdp, R: Rng>(&mut self, mdp: &M, trials: u64, rng: &mut R) {
        for _ in 0..trials {
            self.run_trial(mdp, rng);
        }
    }

    fn make_node<M: Mdp>(
        &mut self,
        mdp: &M,
        state: StateId,
        depth: usize,
        visits: u64,
        rng: Option<&mut dyn RngCore>,
    ) -> Node {
        let cfg = self.cfg;
        let algo = cfg.algorithm;
        let n = if depth >= self.horizon { 0 } else { mdp.num_actions(state) };
        let role = mdp.role(state);
        let v_init = if n == 0 {
            0.0
        } else {
            match (cfg.value_init, rng) {
                (Initializer::Constant { value }, _) => value,
                (Initializer::UniformRollout, Some(rng)) => rollout(mdp, state, depth, self.horizon, rng),
                (Initializer::UniformRollout, None) => 0.0,
            }
        };
        let q = cfg.q_init;
        let table = |used: bool| if used { vec![q; n] } else { Vec::new() };
        let fast = cfg.backup == BackupMode::Fast;
        let mut node = Node {
            state,
            depth,
            role,
            visits,
            n_sa: vec![0; n],
            rewards: vec![0.0; n],
            children: vec![SmallVec::new(); n],
            q_bar: vec![q; n],
            q_hat: table(algo.uses_bellman()),
            q_sft: table(algo.uses_soft()),
            h_q: if algo.uses_entropy() { vec![0.0; n] } else { Vec::new() },
            sums: if fast { vec![[0.0; 3]; n] } else { Vec::new() },
            v_bar: v_init,
            v_hat: v_init,
            v_sft: v_init,
            h_v: 0.0,
            heap: None,
            soft: SoftAux::default(),
            ent: EntropyAux::default(),
            sampler: CachedSampler::new(),
        };
        if n == 0 {
            return node;
        }
        if fast && algo.uses_bellman() {
            let sign = role.sign();
            let signed: Vec<f64> = node.q_hat.iter().map(|&v| sign * v).collect();
            node.heap = Some(IndexedMaxHeap::new(&signed));
        }
        if algo.is_boltzmann() {
            let inputs_visits = visits;
            let mut w = std::mem::take(&mut self.scratch);
            search_policy(&cfg, &node.inputs(inputs_visits), &mut w);
            node.sampler.refresh(cfg.sampling, |out| {
                out.clear();
                out.extend_from_slice(&w);
            });
            self.scratch = w;
            if algo.uses_entropy() {
                node.ent.own = entropy(node.sampler.weights());
                node.h_v = role.sign() * node.ent.own;
            }
        }
        node
    }

    fn select<R: Rng>(&mut self, id: NodeId, rng: &mut R) -> usize {
        let cfg = self.cfg;
        let node = &mut self.nodes[id as usize];
        let n_pre = node.visits - 1;
        if cfg.algorithm == Algorithm::Uct {
            let c = match cfg.uct_bias {
                UctBias::Adaptive => uct_bias(cfg.uct_bias, node.v_bar),
                fixed => uct_bias(fixed, 0.0),
            };
            return uct_select(&node.q_bar, &node.n_sa, n_pre, c, node.role, rng);
        }
        let num = node.n_sa.len();
        let inputs = PolicyInputs {
            role: node.role,
            visits: n_pre,
            q_hat: &node.q_hat,
            q_sft: &node.q_sft,
            q_bar: &node.q_bar,
            h_q: &node.h_q,
        };
        node.sampler.sample(n_pre, num, cfg.sampling, |out| search_policy(&cfg, &inputs, out), rng)
    }

    /// Refreshes the frozen policy exactly as sampling would, without drawing.
    fn touch_sampler(&mut self, id: NodeId) {
        let cfg = self.cfg;
        if !cfg.algorithm.is_boltzmann() {
            return;
        }
        let node = &mut self.nodes[id as usize];
        let n_pre = node.visits - 1;
        let num = node.n_sa.len();
        if node.sampler.needs_rebuild(n_pre, num, cfg.sampling) {
            let inputs = PolicyInputs {
                role: node.role,
                visits: n_pre,
                q_hat: &node.q_hat,
                q_sft: &node.q_sft,
                q_bar: &node.q_bar,
                h_q: &node.h_q,
            };
            node.sampler.refresh(cfg.sampling, |out| search_policy(&cfg, &inputs, out));
        }
    }

    fn trial<M: Mdp, R: Rng>(&mut self, mdp: &M, mut chooser: Chooser<'_, R>) -> Trajectory {
        self.trials += 1;
        let mut steps = Vec::new();
        let mut id = ROOT;
        self.nodes[ROOT as usize].visits += 1;
        let mut expanded = false;
        let leaf_value = loop {
            if self.nodes[id as usize].is_terminal() {
                break 0.0;
            }
            let (action, next_state) = match &mut chooser {
                Chooser::Sample(rng) => {
                    let a = self.select(id, &mut **rng);
                    let node = &self.nodes[id as usize];
                    (a, mdp.sample_successor(node.state, a, &mut **rng))
                }
                Chooser::Replay(_, it) => {
                    let s = it.next().expect("replayed trajectory matches the tree");
                    self.touch_sampler(id);
                    (s.action, s.next_state)
                }
            };
            let node = &mut self.nodes[id as usize];
            if node.n_sa[action] == 0 {
                node.rewards[action] = mdp.reward(node.state, action, node.depth);
            }
            node.n_sa[action] += 1;
            let step = Step { node: id, state: node.state, action, reward: node.rewards[action], next_state };
            steps.push(step);
            if let Some(child) = node.child(action, next_state) {
                self.nodes[child as usize].visits += 1;
                id = child;
                continue;
            }
            let depth = node.depth + 1;
            let rng = match &mut chooser {
                Chooser::Sample(rng) | Chooser::Replay(rng, _) => &mut **rng as &mut dyn RngCore,
            };
            let new = self.make_node(mdp, next_state, depth, 1, Some(rng));
            let leaf = new.v_hat;
            let new_id = self.nodes.len() as NodeId;
            self.nodes.push(new);
            self.nodes[id as usize].children[action].push(Child {
                state: next_state,
                node: new_id,
                v_seen: 0.0,
                sft_seen: 0.0,
                h_seen: 0.0,
            });
            expanded = true;
            break leaf;
        };
        let traj = Trajectory { steps, leaf_value, expanded };
        self.backup(&traj);
        traj
    }

    fn backup(&mut self, traj: &Trajectory) {
        let algo = self.cfg.algorithm;
        let fast = self.cfg.backup == BackupMode::Fast;
        let mut ret = traj.leaf_value;
        for step in traj.steps.iter().rev() {
            ret += step.reward;
            let id = step.node as usize;
            let a = step.action;
            let ci = self.nodes[id].children[a]
                .iter()
                .position(|c| c.state == step.next_state)
                .expect("trajectory follows tree links");
            let child_id = self.nodes[id].children[a][ci].node as usize;
            let (cn, cv, cs, ch) = {
                let c = &self.nodes[child_id];
                (c.visits as f64, c.v_hat, c.v_sft, c.h_v)
            };
            let node = &mut self.nodes[id];
            let n_a = node.n_sa[a];
            node.q_bar[a] += (ret - node.q_bar[a]) / n_a as f64;
            node.v_bar += (ret - node.v_bar) / node.visits as f64;
            if algo.uses_bellman() {
                if fast {
                    bellman_fast(node, a, ci, cn, cv);
                } else {
                    let s = weighted_children(&self.nodes, id, a, |c| c.v_hat);
                    bellman_naive(&mut self.nodes[id], a, s);
                }
            }
            if algo.uses_soft() {
                let alpha = self.cfg.alpha.at(0);
                let node = &mut self.nodes[id];
                if fast {
                    soft_fast(node, a, ci, cn, cs, alpha);
                } else {
                    let s = weighted_children(&self.nodes, id, a, |c| c.v_sft);
                    soft_naive(&mut self.nodes[id], a, s, alpha);
                }
            }
            if algo.uses_entropy() {
                let node = &mut self.nodes[id];
                if fast {
                    entropy_fast(node, a, ci, cn, ch);
                } else {
                    let s = weighted_children(&self.nodes, id, a, |c| c.h_v);
                    entropy_naive(&mut self.nodes[id], a, s);
                }
            }
        }
    }
}

/// `Σ_{s'} N(s') * f(s') / N(s, a)` over the children of edge `a`.
fn weighted_children(nodes: &[Node], id: usize, a: usize, f: impl Fn(&Node) -> f64) -> f64 {
    let node = &nodes[id];
    let total: f64 = node.children[a]
        .iter()
        .map(|c| {
            let child = &nodes[c.node as usize];
            child.visits as f64 * f(child)
        })
        .sum();
    total / node.n_sa[a] as f64
}

fn bellman_naive(node: &mut Node, a: usize, weighted: f64) {
    node.q_hat[a] = node.rewards[a] + weighted;
    node.v_hat = node.role.sign() * signed_max(&node.q_hat, node.role.sign());
}

fn bellman_fast(node: &mut Node, a: usize, ci: usize, cn: f64, cv: f64) {
    let child = &mut node.children[a][ci];
    node.sums[a][0] += cn * cv - (cn - 1.0) * child.v_seen;
    child.v_seen = cv;
    node.q_hat[a] = node.rewards[a] + node.sums[a][0] / node.n_sa[a] as f64;
    let sign = node.role.sign();
    let heap = node.heap.as_mut().expect("fast Bellman backup keeps a heap");
    heap.update(a, sign * node.q_hat[a]);
    node.v_hat = sign * heap.max();
}

fn signed_max(values: &[f64], sign: f64) -> f64 {
    values.iter().map(|&v| sign * v).fold(f64::NEG_INFINITY, f64::max)
}

/// `alpha * ln Σ exp(sign * v / alpha)` with the max shift, plus the shift and sum.
fn signed_lse(values: &[f64], sign: f64, alpha: f64) -> (f64, f64) {
    let m = signed_max(values, sign);
    let e: f64 = values.iter().map(|&v| ((sign * v - m) / alpha).exp()).sum();
    (m, e)
}

fn soft_naive(node: &mut Node, a: usize, weighted: f64, alpha: f64) {
    node.q_sft[a] = node.rewards[a] + weighted;
    let sign = node.role.sign();
    let (m, e) = signed_lse(&node.q_sft, sign, alpha);
    node.v_sft = sign * (alpha * e.ln() + m);
}

fn soft_fast(node: &mut Node, a: usize, ci: usize, cn: f64, cs: f64, alpha: f64) {
    let child = &mut node.children[a][ci];
    node.sums[a][1] += cn * cs - (cn - 1.0) * child.sft_seen;
    child.sft_seen = cs;
    let sign = node.role.sign();
    let x_old = sign * node.q_sft[a];
    node.q_sft[a] = node.rewards[a] + node.sums[a][1] / node.n_sa[a] as f64;
    let x_new = sign * node.q_sft[a];
    let aux = &mut node.soft;
    let mut recompute = !aux.valid;
    if aux.valid {
        let m = aux.m.max(x_new);
        let scale = ((aux.m - m) / alpha).exp();
        let t_old = ((x_old - m) / alpha).exp();
        let t_new = ((x_new - m) / alpha).exp();
        let kept = aux.e * scale;
        let e = kept - t_old + t_new;
        let err = aux.err * scale + 4.0 * f64::EPSILON * (kept + t_old + t_new);
        if e > 0.0 && err <= SOFT_REL_TOL * e {
            *aux = SoftAux { m, e, err, valid: true };
        } else {
            recompute = true;
        }
    }
    if recompute {
        let (m, e) = signed_lse(&node.q_sft, sign, alpha);
        let err = 2.0 * f64::EPSILON * e * node.q_sft.len() as f64;
        node.soft = SoftAux { m, e, err, valid: true };
    }
    node.v_sft = sign * (alpha * node.soft.e.ln() + node.soft.m);
}

fn entropy_naive(node: &mut Node, a: usize, weighted: f64) {
    node.h_q[a] = weighted;
    node.sampler.take_refreshed();
    let w = node.sampler.weights();
    let mix: f64 = w.iter().zip(&node.h_q).map(|(p, h)| p * h).sum();
    node.h_v = node.role.sign() * entropy(w) + mix;
}

fn entropy_fast(node: &mut Node, a: usize, ci: usize, cn: f64, ch: f64) {
    let child = &mut node.children[a][ci];
    node.sums[a][2] += cn * ch - (cn - 1.0) * child.h_seen;
    child.h_seen = ch;
    let old = node.h_q[a];
    node.h_q[a] = node.sums[a][2] / node.n_sa[a] as f64;
    if node.sampler.take_refreshed() {
        let w = node.sampler.weights();
        node.ent.own = entropy(w);
        node.ent.mix = w.iter().zip(&node.h_q).map(|(p, h)| p * h).sum();
    } else {
        node.ent.mix += node.sampler.weights()[a] * (node.h_q[a] - old);
    }
    node.h_v = node.role.sign() * node.ent.own + node.ent.mix;
}

/// Return of one uniformly random rollout from `state` at `depth`.
pub fn rollout<M: Mdp, R: Rng + ?Sized>(
    mdp: &M,
    mut state: StateId,
    mut depth: usize,
    horizon: usize,
    rng: &mut R,
) -> f64 {
    let mut total = 0.0;
    while depth < horizon {
        let n = mdp.num_actions(state);
        if n == 0 {
            break;
        }
        let a = rng.random_range(0..n);
        total += mdp.reward(state, a, depth);
        state = mdp.sample_successor(state, a, rng);
        depth += 1;
    }
    total
}
