//! Algorithm selection and hyperparameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alias::SamplingMode;
use crate::error::{Error, Result};
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Uct,
    Ments,
    Bts,
    Dents,
    ArBts,
    ArDents,
    ArMents,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Uct,
        Algorithm::Ments,
        Algorithm::Bts,
        Algorithm::Dents,
        Algorithm::ArBts,
        Algorithm::ArDents,
        Algorithm::ArMents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Uct => "uct",
            Algorithm::Ments => "ments",
            Algorithm::Bts => "bts",
            Algorithm::Dents => "dents",
            Algorithm::ArBts => "ar-bts",
            Algorithm::ArDents => "ar-dents",
            Algorithm::ArMents => "ar-ments",
        }
    }

    /// Samples actions from a Boltzmann policy rather than by UCB.
    pub fn is_boltzmann(self) -> bool {
        self != Algorithm::Uct
    }

    pub fn uses_bellman(self) -> bool {
        matches!(self, Algorithm::Bts | Algorithm::Dents)
    }

    pub fn uses_soft(self) -> bool {
        self == Algorithm::Ments
    }

    pub fn uses_entropy(self) -> bool {
        matches!(self, Algorithm::Dents | Algorithm::ArDents | Algorithm::ArMents)
    }

    pub fn is_average_return(self) -> bool {
        matches!(self, Algorithm::ArBts | Algorithm::ArDents | Algorithm::ArMents)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s) || a.name().replace('-', "_").eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))
    }
}

/// Exploration constant in the UCB bonus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UctBias {
    Fixed {
        c: f64,
    },
    /// Scale the bonus by the magnitude of the node's current average return.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recommendation {
    #[default]
    ValueArgmax,
    MostVisited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackupMode {
    Naive,
    #[default]
    Fast,
}

/// Value given to a freshly added leaf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Initializer {
    Constant {
        value: f64,
    },
    /// Sum of rewards along one uniformly random rollout to the horizon.
    UniformRollout,
}

impl Default for Initializer {
    fn default() -> Self {
        Initializer::Constant { value: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub alpha: Schedule,
    pub beta: Schedule,
    pub uct_bias: UctBias,
    pub recommendation: Recommendation,
    pub backup: BackupMode,
    pub sampling: SamplingMode,
    pub value_init: Initializer,
    pub q_init: f64,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Bts,
            epsilon: 1.0,
            alpha: Schedule::constant(1.0),
            beta: Schedule::inverse_log(1.0),
            uct_bias: UctBias::Adaptive,
            recommendation: Recommendation::ValueArgmax,
            backup: BackupMode::Fast,
            sampling: SamplingMode::default(),
            value_init: Initializer::default(),
            q_init: 0.0,
        }
    }
}

impl AlgorithmConfig {
    pub fn uct(bias: UctBias) -> Self {
        Self { algorithm: Algorithm::Uct, uct_bias: bias, ..Self::default() }
    }

    pub fn ments(alpha: f64, epsilon: f64) -> Self {
        Self { algorithm: Algorithm::Ments, alpha: Schedule::constant(alpha), epsilon, ..Self::default() }
    }

    pub fn bts(alpha: f64, epsilon: f64) -> Self {
        Self { algorithm: Algorithm::Bts, alpha: Schedule::constant(alpha), epsilon, ..Self::default() }
    }

    pub fn dents(alpha: f64, epsilon: f64, beta: Schedule) -> Self {
        Self { algorithm: Algorithm::Dents, alpha: Schedule::constant(alpha), epsilon, beta, ..Self::default() }
    }

    pub fn ar_bts(alpha: Schedule, epsilon: f64) -> Self {
        Self { algorithm: Algorithm::ArBts, alpha, epsilon, ..Self::default() }
    }

    pub fn ar_dents(alpha: Schedule, epsilon: f64, beta: Schedule) -> Self {
        Self { algorithm: Algorithm::ArDents, alpha, epsilon, beta, ..Self::default() }
    }

    /// AR-DENTS with the entropy weight tied to a fixed temperature.
    pub fn ar_ments(alpha: f64, epsilon: f64) -> Self {
        Self {
            algorithm: Algorithm::ArMents,
            alpha: Schedule::constant(alpha),
            beta: Schedule::constant(alpha),
            epsilon,
            ..Self::default()
        }
    }

    /// Defaults for an algorithm: inverse-sqrt temperatures for the AR family.
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Uct => Self::uct(UctBias::Adaptive),
            Algorithm::Ments => Self::ments(1.0, 1.0),
            Algorithm::Bts => Self::bts(1.0, 1.0),
            Algorithm::Dents => Self::dents(1.0, 1.0, Schedule::inverse_log(1.0)),
            Algorithm::ArBts => Self::ar_bts(Schedule::inverse_sqrt(1.0), 1.0),
            Algorithm::ArDents => Self::ar_dents(Schedule::inverse_sqrt(1.0), 1.0, Schedule::inverse_log(1.0)),
            Algorithm::ArMents => Self::ar_ments(1.0, 1.0),
        }
    }

    /// Tuned values for Frozen Lake.
    pub fn frozen_lake(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Ments => Self::ments(0.001, 1.0),
            Algorithm::Bts => Self::bts(0.1, 2.0),
            Algorithm::Dents => Self::dents(0.1, 1.0, Schedule::inverse_log(1.0)),
            other => Self::for_algorithm(other),
        }
    }

    /// Tuned values for the Sailing Problem, with pessimistic `-200` initial values.
    pub fn sailing(algorithm: Algorithm) -> Self {
        let base = match algorithm {
            Algorithm::Ments => Self::ments(10.0, 1.0),
            Algorithm::Bts => Self::bts(10.0, 1.0),
            Algorithm::Dents => Self::dents(10.0, 1.0, Schedule::inverse_log(10.0)),
            other => Self::for_algorithm(other),
        };
        base.with_init(-200.0)
    }

    pub fn with_init(mut self, value: f64) -> Self {
        self.value_init = Initializer::Constant { value };
        self.q_init = value;
        self
    }

    pub fn with_backup(mut self, backup: BackupMode) -> Self {
        self.backup = backup;
        self
    }

    pub fn with_sampling(mut self, sampling: SamplingMode) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_recommendation(mut self, recommendation: Recommendation) -> Self {
        self.recommendation = recommendation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let algo = self.algorithm;
        if algo.is_boltzmann() {
            if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
                return Err(Error::InvalidExploration(self.epsilon));
            }
            let a0 = self.alpha.initial();
            if !(a0 > 0.0 && a0.is_finite()) {
                return Err(Error::InvalidTemperature(a0));
            }
        }
        if algo == Algorithm::Ments && !self.alpha.is_constant() {
            return Err(Error::InvalidConfig("MENTS needs a constant temperature".into()));
        }
        if matches!(algo, Algorithm::Dents | Algorithm::ArDents) {
            let b0 = self.beta.initial();
            if !(b0 >= 0.0 && b0.is_finite()) {
                return Err(Error::InvalidConfig(format!("entropy weight must be non-negative and finite, got {b0}")));
            }
        }
        if let UctBias::Fixed { c } = self.uct_bias {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidExploration(c));
            }
        }
        if !self.q_init.is_finite() {
            return Err(Error::InvalidConfig("initial Q-value must be finite".into()));
        }
        if let Initializer::Constant { value } = self.value_init {
            if !value.is_finite() {
                return Err(Error::InvalidConfig("initial value must be finite".into()));
            }
        }
        if algo.is_average_return() && algo != Algorithm::ArMents && !self.alpha.decays() {
            log::warn!("{algo} with a non-decaying temperature is not consistent");
        }
        Ok(())
    }
}
