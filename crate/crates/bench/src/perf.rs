//! Throughput benchmarks for the alias sampler and the fast backups.

use std::hint::black_box;
use std::time::Instant;

use mcts_core::envs::WideTree;
use mcts_core::{stream_rng, AlgorithmConfig, AliasTable, BackupMode, SamplingMode, SearchTree};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingBench {
    pub branching: Vec<usize>,
    pub depth: usize,
    /// Untimed trials run first so the timed ones go through built nodes.
    pub warmup: u64,
    pub trials: u64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SamplingBench {
    fn default() -> Self {
        Self { branching: vec![2, 16, 64, 128, 256], depth: 2, warmup: 2_000, trials: 20_000, repeats: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    /// `alias` compares alias-on to alias-off, `backup` fast to naive.
    pub comparison: &'static str,
    pub branching: usize,
    pub on_trials_per_sec: f64,
    pub off_trials_per_sec: f64,
    pub ratio: f64,
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median trials per second of `cfg` on `env` over `repeats` fresh trees.
pub fn trials_per_sec(env: &WideTree, cfg: AlgorithmConfig, bench: &SamplingBench) -> f64 {
    let samples = (0..bench.repeats.max(1))
        .map(|r| {
            let mut tree = SearchTree::new(env, cfg).expect("benchmark configs are valid");
            let mut rng = stream_rng(bench.seed + r as u64, 0);
            tree.run(env, bench.warmup, &mut rng);
            let start = Instant::now();
            tree.run(env, bench.trials, &mut rng);
            bench.trials as f64 / start.elapsed().as_secs_f64()
        })
        .collect();
    median(samples)
}

/// BTS throughput with alias sampling on and off, and with fast and naive backups.
pub fn bench_sampling(bench: &SamplingBench) -> mcts_core::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let base = AlgorithmConfig::bts(1.0, 1.0);
    let alias = SamplingMode::Alias { cadence: None };
    for &a in &bench.branching {
        let env = WideTree::new(a, bench.depth, bench.seed)?;
        let on = trials_per_sec(&env, base.with_sampling(alias), bench);
        let off = trials_per_sec(&env, base.with_sampling(SamplingMode::Direct), bench);
        log::info!("|A|={a} alias on {on:.0}/s off {off:.0}/s");
        rows.push(BenchRow {
            comparison: "alias",
            branching: a,
            on_trials_per_sec: on,
            off_trials_per_sec: off,
            ratio: on / off,
        });
        let fast = trials_per_sec(&env, base.with_backup(BackupMode::Fast), bench);
        let naive = trials_per_sec(&env, base.with_backup(BackupMode::Naive), bench);
        log::info!("|A|={a} fast {fast:.0}/s naive {naive:.0}/s");
        rows.push(BenchRow {
            comparison: "backup",
            branching: a,
            on_trials_per_sec: fast,
            off_trials_per_sec: naive,
            ratio: fast / naive,
        });
    }
    Ok(rows)
}

/// Median nanoseconds per alias draw from a random `m`-category table.
pub fn alias_draw_ns(m: usize, draws: u64, repeats: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 0);
    let weights: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
    let table = AliasTable::new(&weights).expect("positive weights");
    let samples = (0..repeats.max(1))
        .map(|_| {
            let mut acc = 0usize;
            let start = Instant::now();
            for _ in 0..draws {
                acc = acc.wrapping_add(table.sample(&mut rng));
            }
            let ns = start.elapsed().as_nanos() as f64;
            black_box(acc);
            ns / draws as f64
        })
        .collect();
    median(samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawTiming {
    pub small_m: usize,
    pub large_m: usize,
    pub small_ns: f64,
    pub large_ns: f64,
    pub ratio: f64,
}

pub fn draw_timing(small_m: usize, large_m: usize, draws: u64, repeats: usize) -> DrawTiming {
    let small_ns = alias_draw_ns(small_m, draws, repeats, 1);
    let large_ns = alias_draw_ns(large_m, draws, repeats, 1);
    DrawTiming { small_m, large_m, small_ns, large_ns, ratio: large_ns / small_ns }
}
