use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mcts_bench::oracle_dump::{self, OracleKind};
use mcts_bench::perf::{self, SamplingBench};
use mcts_bench::{env_from_params, run_experiments, ExperimentConfig, ENV_NAMES};
use mcts_core::Algorithm;

#[derive(Parser)]
#[command(name = "mcts-bench", version, about = "Run MCTS experiments and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, seed) cell of an experiment config and write a CSV.
    Run {
        /// TOML experiment config; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, overriding the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run a single seed instead of the config's list.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Time alias-on/off and fast/naive BTS on wide trees.
    Bench {
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 16, 64, 128, 256])]
        branching: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write an oracle value table.
    Oracle {
        /// Environment name (see list-envs).
        #[arg(long)]
        env: String,
        /// Environment parameter as key=value; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// standard, minimax, soft or soft:<alpha>.
        #[arg(long, default_value = "standard")]
        kind: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List environments and algorithms.
    ListEnvs,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config, out, seed, jobs } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.seeds = vec![seed];
            }
            if let Some(out) = out {
                cfg.output = out;
            }
            let dir = cfg.output.clone();
            let summary = run_experiments(&cfg, &dir, jobs)?;
            log::info!(
                "wrote {} rows to {} (config in {})",
                summary.rows,
                summary.results.display(),
                summary.resolved_config.display()
            );
        }
        Command::Bench { out, branching, depth, trials, repeats, seed } => {
            if let Some(a) = branching.iter().find(|&&a| a < 2) {
                anyhow::bail!("branching must be at least 2, got {a}");
            }
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let bench = SamplingBench { branching, depth, trials, repeats, seed, ..SamplingBench::default() };
            fs::write(out.join("bench_config.toml"), toml::to_string(&bench)?)?;
            let rows = perf::bench_sampling(&bench)?;
            let mut w = csv::Writer::from_path(out.join("bench.csv"))?;
            for row in &rows {
                println!(
                    "{:<6} |A|={:<4} on {:>12.0}/s off {:>12.0}/s ratio {:.3}",
                    row.comparison, row.branching, row.on_trials_per_sec, row.off_trials_per_sec, row.ratio
                );
                w.serialize(row)?;
            }
            w.flush()?;
            let draws = perf::draw_timing(16, 4096, 2_000_000, repeats);
            println!(
                "alias draw m={} {:.2} ns, m={} {:.2} ns, ratio {:.3}",
                draws.small_m, draws.small_ns, draws.large_m, draws.large_ns, draws.ratio
            );
            let mut w = csv::Writer::from_path(out.join("alias_draws.csv"))?;
            w.serialize(&draws)?;
            w.flush()?;
        }
        Command::Oracle { env, params, kind, out } => {
            let spec = env_from_params(&env, &params)?;
            let kind: OracleKind = kind.parse()?;
            let tables = oracle_dump::solve(&spec.build()?, kind)?;
            match out {
                Some(path) => {
                    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    oracle_dump::write_table(&tables, BufWriter::new(f))?;
                }
                None => oracle_dump::write_table(&tables, io::stdout().lock())?,
            }
            log::info!("{spec}: root value {}", tables.root_value());
        }
        Command::ListEnvs => {
            let mut out = io::stdout().lock();
            writeln!(out, "environments:")?;
            for (name, about) in ENV_NAMES {
                writeln!(out, "  {name:<12} {about}")?;
            }
            writeln!(out, "algorithms:")?;
            for a in Algorithm::ALL {
                writeln!(out, "  {a}")?;
            }
        }
    }
    Ok(())
}
