//! Search policies: UCB selection and the Boltzmann family.
//!
//! Values are always stored from the maximizer's point of view. At a
//! minimizer node every logit is multiplied by the role sign, so the same
//! kernels put mass on small values there.

use rand::Rng;

use crate::config::{Algorithm, AlgorithmConfig, UctBias};
use crate::mdp::Role;
use crate::schedule::{exploration_weight, Schedule};
use crate::softmax::softmax_in_place;

/// Per-action tables a policy may read, borrowed from a node.
#[derive(Debug, Clone, Copy)]
pub struct PolicyInputs<'a> {
    pub role: Role,
    /// Visits to the node before the current trial.
    pub visits: u64,
    pub q_hat: &'a [f64],
    pub q_sft: &'a [f64],
    pub q_bar: &'a [f64],
    pub h_q: &'a [f64],
}

/// `(1 - lambda) * probs + lambda / |A|`, in place.
pub fn mix_uniform(probs: &mut [f64], lambda: f64) {
    let u = lambda / probs.len() as f64;
    for p in probs.iter_mut() {
        *p = (1.0 - lambda) * *p + u;
    }
}

fn boltzmann_mix(logits: impl Iterator<Item = f64>, role: Role, temp: f64, lambda: f64, out: &mut Vec<f64>) {
    let sign = role.sign();
    out.clear();
    out.extend(logits.map(|l| sign * l));
    softmax_in_place(out, temp);
    mix_uniform(out, lambda);
}

/// `pi(a) = (1 - lambda) softmax(Q_sft / alpha) + lambda / |A|`.
pub fn ments_policy(q_sft: &[f64], alpha: f64, epsilon: f64, visits: u64, role: Role) -> Vec<f64> {
    let mut out = Vec::with_capacity(q_sft.len());
    boltzmann_mix(q_sft.iter().copied(), role, alpha, exploration_weight(epsilon, visits), &mut out);
    out
}

/// Same mixture as MENTS over Bellman values.
pub fn bts_policy(q_hat: &[f64], alpha: f64, epsilon: f64, visits: u64, role: Role) -> Vec<f64> {
    let mut out = Vec::with_capacity(q_hat.len());
    boltzmann_mix(q_hat.iter().copied(), role, alpha, exploration_weight(epsilon, visits), &mut out);
    out
}

/// BTS with entropy bonus `beta(N(s)) * H_Q` added to every logit.
pub fn dents_policy(
    q_hat: &[f64],
    h_q: &[f64],
    alpha: f64,
    beta: &Schedule,
    epsilon: f64,
    visits: u64,
    role: Role,
) -> Vec<f64> {
    let b = beta.at(visits);
    let mut out = Vec::with_capacity(q_hat.len());
    boltzmann_mix(
        q_hat.iter().zip(h_q).map(|(q, h)| q + b * h),
        role,
        alpha,
        exploration_weight(epsilon, visits),
        &mut out,
    );
    out
}

/// Boltzmann policy over average returns at temperature `alpha(N(s))`.
pub fn ar_bts_policy(q_bar: &[f64], alpha: &Schedule, epsilon: f64, visits: u64, role: Role) -> Vec<f64> {
    let mut out = Vec::with_capacity(q_bar.len());
    boltzmann_mix(q_bar.iter().copied(), role, alpha.at(visits), exploration_weight(epsilon, visits), &mut out);
    out
}

/// AR-BTS with entropy bonus; AR-MENTS is `beta = alpha = const`.
pub fn ar_dents_policy(
    q_bar: &[f64],
    h_q: &[f64],
    alpha: &Schedule,
    beta: &Schedule,
    epsilon: f64,
    visits: u64,
    role: Role,
) -> Vec<f64> {
    let b = beta.at(visits);
    let mut out = Vec::with_capacity(q_bar.len());
    boltzmann_mix(
        q_bar.iter().zip(h_q).map(|(q, h)| q + b * h),
        role,
        alpha.at(visits),
        exploration_weight(epsilon, visits),
        &mut out,
    );
    out
}

/// Writes the configured Boltzmann search policy into `out`.
///
/// Panics for UCT, which has no stochastic policy.
pub fn search_policy(cfg: &AlgorithmConfig, inputs: &PolicyInputs<'_>, out: &mut Vec<f64>) {
    let n = inputs.visits;
    let lambda = exploration_weight(cfg.epsilon, n);
    let temp = cfg.alpha.at(n);
    match cfg.algorithm {
        Algorithm::Ments => boltzmann_mix(inputs.q_sft.iter().copied(), inputs.role, temp, lambda, out),
        Algorithm::Bts => boltzmann_mix(inputs.q_hat.iter().copied(), inputs.role, temp, lambda, out),
        Algorithm::Dents => {
            let b = cfg.beta.at(n);
            let logits = inputs.q_hat.iter().zip(inputs.h_q).map(|(q, h)| q + b * h);
            boltzmann_mix(logits, inputs.role, temp, lambda, out)
        }
        Algorithm::ArBts => boltzmann_mix(inputs.q_bar.iter().copied(), inputs.role, temp, lambda, out),
        Algorithm::ArDents | Algorithm::ArMents => {
            let b = if cfg.algorithm == Algorithm::ArMents { temp } else { cfg.beta.at(n) };
            let logits = inputs.q_bar.iter().zip(inputs.h_q).map(|(q, h)| q + b * h);
            boltzmann_mix(logits, inputs.role, temp, lambda, out)
        }
        Algorithm::Uct => panic!("UCT selects by UCB, not by a sampled policy"),
    }
}

/// UCB scores `sign * Q_bar + c * sqrt(ln N / N(a))` for visited actions.
pub fn uct_scores(q_bar: &[f64], action_visits: &[u64], visits: u64, c: f64, role: Role) -> Vec<f64> {
    let ln_n = (visits.max(1) as f64).ln();
    q_bar.iter().zip(action_visits).map(|(&q, &n)| role.sign() * q + c * (ln_n / n as f64).sqrt()).collect()
}

/// Bias constant at a node with average return `v_bar`.
pub fn uct_bias(bias: UctBias, v_bar: f64) -> f64 {
    match bias {
        UctBias::Fixed { c } => c,
        UctBias::Adaptive => v_bar.abs(),
    }
}

/// Uniform over unvisited actions, else the lowest-index UCB maximizer.
pub fn uct_select<R: Rng + ?Sized>(
    q_bar: &[f64],
    action_visits: &[u64],
    visits: u64,
    c: f64,
    role: Role,
    rng: &mut R,
) -> usize {
    let unvisited = action_visits.iter().filter(|&&n| n == 0).count();
    if unvisited > 0 {
        let k = rng.random_range(0..unvisited);
        return action_visits
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 0)
            .nth(k)
            .map(|(i, _)| i)
            .expect("k indexes an unvisited action");
    }
    let scores = uct_scores(q_bar, action_visits, visits, c, role);
    crate::oracle::argbest(&scores, Role::Maximizer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn ments_mixture() {
        assert_eq!(ments_policy(&[3.0, -1.0, 0.0], 1.0, 1.0, 0, Role::Maximizer), vec![1.0 / 3.0; 3]);
        // lambda = 0.5 at N with ln(e + N) = 2.
        let n = (E * E - E).round() as u64;
        let lambda = exploration_weight(1.0, n);
        let p = ments_policy(&[1.0, 0.0], 1.0, 1.0, n, Role::Maximizer);
        let rho = [E / (1.0 + E), 1.0 / (1.0 + E)];
        for i in 0..2 {
            assert_abs_diff_eq!(p[i], (1.0 - lambda) * rho[i] + lambda / 2.0, epsilon = 1e-12);
        }
        let tiny = ments_policy(&[1.0, 0.0], 1.0, 1e-300, 5, Role::Maximizer);
        assert_abs_diff_eq!(tiny[0], rho[0], epsilon = 1e-12);
    }

    #[test]
    fn bts_ratio_and_greedy_limit() {
        let p = bts_policy(&[0.9, 0.5], 0.1, 1e-300, 3, Role::Maximizer);
        assert_abs_diff_eq!(p[0] / p[1], 4f64.exp(), epsilon = 1e-9);
        let g = bts_policy(&[0.3, 0.2, 0.1], 1e-6, 1e-300, 3, Role::Maximizer);
        assert_abs_diff_eq!(g[0], 1.0, epsilon = 1e-6);
        assert_eq!(bts_policy(&[0.0, 0.0], 0.5, 1e-300, 3, Role::Maximizer), vec![0.5, 0.5]);
    }

    #[test]
    fn dents_reduces_to_bts() {
        let q = [0.4, -0.1, 0.2];
        let h = [0.7, 0.1, 0.0];
        let d = dents_policy(&q, &h, 0.3, &Schedule::constant(0.0), 1.0, 9, Role::Maximizer);
        assert_eq!(d, bts_policy(&q, 0.3, 1.0, 9, Role::Maximizer));
        let d = dents_policy(&[0.0, 0.0], &[LN_2, 0.0], 1.0, &Schedule::constant(1.0), 1e-300, 9, Role::Maximizer);
        assert_abs_diff_eq!(d[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn ar_dents_closed_form() {
        let a = Schedule::constant(1.0);
        let d = ar_dents_policy(&[0.0, 0.0], &[LN_2, 0.0], &a, &a, 1e-300, 4, Role::Maximizer);
        assert_abs_diff_eq!(d[0], 2.0 / 3.0, epsilon = 1e-12);
        let z = Schedule::constant(0.0);
        assert_eq!(
            ar_dents_policy(&[0.3, 0.1], &[1.0, 0.0], &a, &z, 1.0, 4, Role::Maximizer),
            ar_bts_policy(&[0.3, 0.1], &a, 1.0, 4, Role::Maximizer)
        );
        assert_eq!(ar_bts_policy(&[0.0, 0.0], &a, 1.0, 4, Role::Maximizer), vec![0.5, 0.5]);
        let cold = ar_bts_policy(&[0.2, 0.1], &Schedule::inverse_sqrt(1.0), 1e-300, 1 << 40, Role::Maximizer);
        assert!(cold[0] > 1.0 - 1e-12);
    }

    #[test]
    fn minimizer_puts_mass_on_small_values() {
        let p = bts_policy(&[1.0, 0.0], 1.0, 1e-300, 2, Role::Minimizer);
        assert_abs_diff_eq!(p[0], 1.0 / (1.0 + E), epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], E / (1.0 + E), epsilon = 1e-12);
    }

    #[test]
    fn uct_prefers_unvisited() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [0; 3];
        for _ in 0..300 {
            let a = uct_select(&[5.0, 0.0, 0.0], &[3, 0, 0], 4, 1.0, Role::Maximizer, &mut rng);
            assert_ne!(a, 0);
            seen[a] += 1;
        }
        assert!(seen[1] > 100 && seen[2] > 100);
    }

    #[test]
    fn uct_formula() {
        let s = uct_scores(&[1.0, 0.0], &[6, 2], 8, 1.0, Role::Maximizer);
        let l = 8f64.ln();
        assert_eq!(s, vec![1.0 + (l / 6.0).sqrt(), (l / 2.0).sqrt()]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let want = if s[0] >= s[1] { 0 } else { 1 };
        assert_eq!(uct_select(&[1.0, 0.0], &[6, 2], 8, 1.0, Role::Maximizer, &mut rng), want);
        assert_eq!(uct_select(&[1.0, 0.0], &[6, 2], 8, 0.0, Role::Maximizer, &mut rng), 0);
        assert_eq!(uct_select(&[1.0, 0.0], &[6, 2], 8, 0.0, Role::Minimizer, &mut rng), 1);
    }
}
