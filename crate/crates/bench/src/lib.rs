//! Experiment runner, oracle dumps and micro-benchmarks on top of `mcts-core`.

pub mod config;
pub mod env;
pub mod oracle_dump;
pub mod perf;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig};
pub use env::{Env, EnvSpec, LakeMap, ENV_NAMES};
pub use runner::{run_experiments, RunSummary};

/// Parses an environment from its name and `key=value` parameters, where each
/// value is a TOML literal (bare words are read as strings).
pub fn env_from_params(name: &str, params: &[String]) -> anyhow::Result<EnvSpec> {
    let mut table = toml::Table::new();
    table.insert("name".into(), toml::Value::String(name.into()));
    for p in params {
        let (key, raw) = p.split_once('=').ok_or_else(|| anyhow::anyhow!("parameter {p:?} is not key=value"))?;
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.into()));
        table.insert(key.trim().into(), value);
    }
    Ok(table.try_into()?)
}
