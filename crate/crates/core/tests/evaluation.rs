use mcts_core::envs::*;
use mcts_core::eval::*;
use mcts_core::*;

/// Exact value of the uniform policy by enumerating every action sequence.
fn uniform_value<M: Mdp>(mdp: &M, s: StateId, t: usize) -> f64 {
    let n = mdp.num_actions(s);
    if n == 0 || t == mdp.horizon() {
        return 0.0;
    }
    (0..n)
        .map(|a| {
            let future: f64 = mdp.successors(s, a).iter().map(|&(s2, p)| p * uniform_value(mdp, s2, t + 1)).sum();
            mdp.reward(s, a, t) + future
        })
        .sum::<f64>()
        / n as f64
}

#[test]
fn uniform_chain_value_within_four_sigma() {
    let chain = DChain::new(10, 1.0).unwrap();
    let exact = uniform_value(&chain, chain.initial_state(), 0);
    let est = evaluate_policy(&mut UniformPolicy, &chain, 20_000, &mut stream_rng(3, EVAL_STREAM)).unwrap();
    assert!((est.mean - exact).abs() < 4.0 * est.std_err, "{} vs {exact}", est.mean);
    assert!((est.std_err - est.std_dev / (20_000f64).sqrt()).abs() < 1e-15);
}

#[test]
fn greedy_oracle_policy_has_no_regret() {
    let lake = FrozenLake::new(GridMap::parse(FROZEN_LAKE_8X12).unwrap(), FROZEN_LAKE_HORIZON).unwrap();
    let t = value_iterate(&lake);
    let est = evaluate_policy(&mut GreedyPolicy::new(&t, &lake), &lake, 50, &mut stream_rng(0, EVAL_STREAM)).unwrap();
    let r = simple_regret(est.mean, t.root_value());
    assert!(r.raw.abs() < 1e-12);

    let s = Sailing::new(SailingSpec::benchmark(2)).unwrap();
    let t = value_iterate(&s);
    let est = evaluate_policy(&mut GreedyPolicy::new(&t, &s), &s, 4_000, &mut stream_rng(0, EVAL_STREAM)).unwrap();
    assert!((est.mean - t.root_value()).abs() < 4.0 * est.std_err + 1e-12);
}

#[test]
fn learning_curve_rows_and_regret() {
    let chain = DChain::new(10, 0.5).unwrap();
    let oracle = value_iterate(&chain).root_value();
    let spec =
        CurveSpec { total_trials: 2_000, checkpoint_every: 500, eval_trajectories: 100, seed: 1, record_timing: true };
    let mut seen = Vec::new();
    let report =
        run_learning_curve(&chain, AlgorithmConfig::bts(1.0, 1.0), &spec, oracle, "dchain", |c| seen.push(c.n_trials))
            .unwrap();
    assert_eq!(seen, vec![500, 1000, 1500, 2000]);
    for c in &report.checkpoints {
        assert!((c.simple_regret - (oracle - c.est_value)).abs() < 1e-15);
        assert_eq!(c.simple_regret_clamped, c.simple_regret.max(0.0));
        assert!(c.trials_per_sec > 0.0);
    }
}

#[test]
fn zero_budgets_rejected() {
    let chain = DChain::new(3, 1.0).unwrap();
    let spec = CurveSpec { eval_trajectories: 0, ..CurveSpec::default() };
    assert!(run_learning_curve(&chain, AlgorithmConfig::bts(1.0, 1.0), &spec, 1.0, "c", |_| {}).is_err());
    assert!(evaluate_policy(&mut UniformPolicy, &chain, 0, &mut stream_rng(0, 1)).is_err());
}
