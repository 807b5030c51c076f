//! Batch execution of (algorithm, seed) cells with ordered CSV output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use anyhow::{Context, Result};
use mcts_core::eval::{run_learning_curve, Checkpoint, CurveSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const RESULTS_FILE: &str = "results.csv";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";

pub fn schema_comment() -> String {
    format!("# mcts-bench results schema v{SCHEMA_VERSION}")
}

pub const HEADER: [&str; 9] =
    ["algorithm", "env", "seed", "n_trials", "est_value", "std_err", "simple_regret", "wallclock_ns", "trials_per_sec"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub algorithm: String,
    pub env: String,
    pub seed: u64,
    pub n_trials: u64,
    pub est_value: f64,
    pub std_err: f64,
    pub simple_regret: f64,
    pub wallclock_ns: u64,
    pub trials_per_sec: f64,
}

impl Row {
    fn new(algorithm: &str, env: &str, seed: u64, c: &Checkpoint) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            env: env.to_string(),
            seed,
            n_trials: c.n_trials,
            est_value: c.est_value,
            std_err: c.std_err,
            simple_regret: c.simple_regret,
            wallclock_ns: c.wallclock_ns,
            trials_per_sec: c.trials_per_sec,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub results: PathBuf,
    pub resolved_config: PathBuf,
    pub rows: usize,
    pub oracle_value: f64,
}

enum Message {
    Row(usize, Row),
    Done(usize, mcts_core::Result<()>),
}

/// Runs every (algorithm, seed) cell and writes `results.csv` and
/// `resolved_config.toml` into `out_dir`.
///
/// Cells run on `jobs` worker threads but rows are written in config order
/// (algorithm-major, then seed), and flushed as soon as they are final, so an
/// interrupted run leaves a valid prefix.
pub fn run_experiments(cfg: &ExperimentConfig, out_dir: &Path, jobs: Option<usize>) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let resolved_config = out_dir.join(RESOLVED_CONFIG_FILE);
    fs::write(&resolved_config, cfg.to_toml_string())
        .with_context(|| format!("writing {}", resolved_config.display()))?;
    log::info!("resolved config:\n{}", cfg.to_toml_string());

    let env = cfg.env.build().context("building environment")?;
    let env_label = cfg.env.to_string();
    let oracle_value = env.optimal_value();
    log::info!("{env_label}: optimal value {oracle_value}");

    let cells: Vec<(usize, usize)> =
        (0..cfg.algorithms.len()).flat_map(|a| (0..cfg.seeds.len()).map(move |s| (a, s))).collect();

    let results = out_dir.join(RESULTS_FILE);
    let file = File::create(&results).with_context(|| format!("creating {}", results.display()))?;
    let mut raw = BufWriter::new(file);
    writeln!(raw, "{}", schema_comment())?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(raw);
    writer.write_record(HEADER)?;
    writer.flush()?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build()?;
    let (tx, rx) = mpsc::channel::<Message>();
    let mut rows = 0;
    let mut failure = None;
    std::thread::scope(|scope| -> Result<()> {
        let cells = &cells;
        let env = &env;
        let env_label = env_label.as_str();
        scope.spawn(move || {
            pool.install(|| {
                cells.par_iter().enumerate().for_each_with(tx, |tx, (i, &(a, s))| {
                    let algo = cfg.algorithms[a];
                    let seed = cfg.seeds[s];
                    let spec = CurveSpec {
                        total_trials: cfg.trials,
                        checkpoint_every: cfg.checkpoint_every,
                        eval_trajectories: cfg.eval_trajectories,
                        seed,
                        record_timing: cfg.record_timing,
                    };
                    let name = algo.algorithm.name();
                    let out = run_learning_curve(env, algo, &spec, oracle_value, env_label, |c| {
                        let _ = tx.send(Message::Row(i, Row::new(name, env_label, seed, c)));
                    });
                    let _ = tx.send(Message::Done(i, out.map(|_| ())));
                });
            });
        });

        let mut pending: Vec<Vec<Row>> = vec![Vec::new(); cells.len()];
        let mut done = vec![false; cells.len()];
        let mut head = 0;
        for msg in rx {
            match msg {
                Message::Row(i, row) => pending[i].push(row),
                Message::Done(i, res) => {
                    done[i] = true;
                    if let Err(e) = res {
                        failure.get_or_insert(anyhow::anyhow!("cell {i}: {e}"));
                    }
                }
            }
            while head < cells.len() {
                let wrote = !pending[head].is_empty();
                for row in pending[head].drain(..) {
                    writer.serialize(row)?;
                    rows += 1;
                }
                if wrote {
                    writer.flush()?;
                }
                if !done[head] {
                    break;
                }
                head += 1;
            }
        }
        Ok(())
    })?;
    writer.flush()?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RunSummary { results, resolved_config, rows, oracle_value })
}
