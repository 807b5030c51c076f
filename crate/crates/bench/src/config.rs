//! Declarative experiment configuration (TOML).

use std::path::{Path, PathBuf};

use mcts_core::{Algorithm, AlgorithmConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::EnvSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("algorithms[{index}]: {message}")]
    Algorithm { index: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// One experiment: an environment, the algorithms to run on it and the seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seeds: Vec<u64>,
    pub trials: u64,
    pub checkpoint_every: u64,
    pub eval_trajectories: u64,
    pub output: PathBuf,
    /// Set to false for byte-reproducible CSVs (timing columns become 0).
    pub record_timing: bool,
    pub env: EnvSpec,
    pub algorithms: Vec<AlgorithmConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AlgorithmEntry {
    Name(String),
    Table(toml::Table),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seeds: Option<Vec<u64>>,
    trials: Option<u64>,
    checkpoint_every: Option<u64>,
    eval_trajectories: Option<u64>,
    output: Option<PathBuf>,
    record_timing: Option<bool>,
    #[serde(default)]
    env: EnvSpec,
    algorithms: Option<Vec<AlgorithmEntry>>,
}

const DEFAULT_ALGORITHMS: [Algorithm; 4] = [Algorithm::Uct, Algorithm::Ments, Algorithm::Bts, Algorithm::Dents];

impl Default for ExperimentConfig {
    fn default() -> Self {
        let env = EnvSpec::default();
        Self {
            seeds: (0..5).collect(),
            trials: 5000,
            checkpoint_every: 250,
            eval_trajectories: 250,
            output: PathBuf::from("results"),
            record_timing: true,
            algorithms: DEFAULT_ALGORITHMS.iter().map(|&a| env.default_config(a)).collect(),
            env,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let d = Self::default();
        let algorithms = match raw.algorithms {
            None => DEFAULT_ALGORITHMS.iter().map(|&a| raw.env.default_config(a)).collect(),
            Some(entries) => entries
                .into_iter()
                .enumerate()
                .map(|(index, e)| {
                    resolve_algorithm(&raw.env, e).map_err(|message| ConfigError::Algorithm { index, message })
                })
                .collect::<Result<_, _>>()?,
        };
        let cfg = Self {
            seeds: raw.seeds.unwrap_or(d.seeds),
            trials: raw.trials.unwrap_or(d.trials),
            checkpoint_every: raw.checkpoint_every.unwrap_or(d.checkpoint_every),
            eval_trajectories: raw.eval_trajectories.unwrap_or(d.eval_trajectories),
            output: raw.output.unwrap_or(d.output),
            record_timing: raw.record_timing.unwrap_or(d.record_timing),
            env: raw.env,
            algorithms,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("seeds: at least one seed is needed".into()));
        }
        if self.algorithms.is_empty() {
            return Err(ConfigError::Invalid("algorithms: at least one algorithm is needed".into()));
        }
        for (name, v) in [
            ("trials", self.trials),
            ("checkpoint_every", self.checkpoint_every),
            ("eval_trajectories", self.eval_trajectories),
        ] {
            if v == 0 {
                return Err(ConfigError::Invalid(format!("{name}: must be positive")));
            }
        }
        for (index, a) in self.algorithms.iter().enumerate() {
            a.validate().map_err(|e| ConfigError::Algorithm { index, message: e.to_string() })?;
        }
        Ok(())
    }

    /// The config with every default filled in.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialise")
    }
}

/// Starts from the environment's tuned defaults for the named algorithm and
/// overrides whatever keys the entry sets.
fn resolve_algorithm(env: &EnvSpec, entry: AlgorithmEntry) -> Result<AlgorithmConfig, String> {
    let (name, overrides) = match entry {
        AlgorithmEntry::Name(name) => (name, toml::Table::new()),
        AlgorithmEntry::Table(t) => {
            let name = match t.get("algorithm") {
                Some(toml::Value::String(s)) => s.clone(),
                Some(_) => return Err("`algorithm` must be a string".into()),
                None => return Err("missing field `algorithm`".into()),
            };
            (name, t)
        }
    };
    let algorithm: Algorithm = name.parse().map_err(|e: mcts_core::Error| e.to_string())?;
    let mut table = toml::Table::try_from(env.default_config(algorithm)).map_err(|e| e.to_string())?;
    for (key, value) in overrides {
        if key == "algorithm" {
            continue;
        }
        if !table.contains_key(&key) {
            return Err(format!("unknown field `{key}`"));
        }
        table.insert(key, value);
    }
    let cfg: AlgorithmConfig = table.try_into().map_err(|e: toml::de::Error| e.message().to_string())?;
    Ok(AlgorithmConfig { algorithm, ..cfg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcts_core::Schedule;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn frozen_lake_defaults_follow_env() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            algorithms = ["ments", "bts"]
            [env]
            name = "frozen-lake"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.algorithms[0].alpha, Schedule::constant(0.001));
        assert_eq!(cfg.algorithms[0].epsilon, 1.0);
        assert_eq!(cfg.algorithms[1].alpha, Schedule::constant(0.1));
        assert_eq!(cfg.algorithms[1].epsilon, 2.0);
    }

    #[test]
    fn override_merges_over_defaults() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            [[algorithms]]
            algorithm = "dents"
            epsilon = 0.5
            beta = { kind = "constant", value = 0.2 }
            "#,
        )
        .unwrap();
        let a = cfg.algorithms[0];
        assert_eq!(a.algorithm, Algorithm::Dents);
        assert_eq!(a.epsilon, 0.5);
        assert_eq!(a.beta, Schedule::constant(0.2));
        assert_eq!(a.alpha, Schedule::constant(1.0));
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            seeds = [3, 4]
            record_timing = false
            algorithms = ["uct", "ar-bts", "ar-ments"]
            [env]
            name = "sailing"
            initial_wind = 5
            "#,
        )
        .unwrap();
        let text = cfg.to_toml_string();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_line_or_field() {
        let err = ExperimentConfig::from_toml_str("trials = \"many\"\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        let err = ExperimentConfig::from_toml_str("seeds = [1]\ntrails = 5\n").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("trails"), "{err}");
        let err = ExperimentConfig::from_toml_str("[[algorithms]]\nalgorithm = \"bts\"\nalpah = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("algorithms[0]") && err.contains("alpah"), "{err}");
        let err = ExperimentConfig::from_toml_str("algorithms = [\"puct\"]").unwrap_err().to_string();
        assert!(err.contains("puct"), "{err}");
        let err = ExperimentConfig::from_toml_str("algorithms = [{ algorithm = \"bts\", epsilon = -1.0 }]")
            .unwrap_err()
            .to_string();
        assert!(err.contains("algorithms[0]"), "{err}");
        assert!(ExperimentConfig::from_toml_str("trials = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("[env]\nname = \"chess\"").is_err());
    }
}
