//! Visit-count schedules for temperatures and entropy weights.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

/// `f(m)` for a node visited `m` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    Constant {
        value: f64,
    },
    /// `value / ln(e + m)`
    InverseLog {
        value: f64,
    },
    /// `value / sqrt(m)`, read as `value` at `m = 0`.
    InverseSqrt {
        value: f64,
    },
}

impl Schedule {
    pub const fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub const fn inverse_log(value: f64) -> Self {
        Schedule::InverseLog { value }
    }

    pub const fn inverse_sqrt(value: f64) -> Self {
        Schedule::InverseSqrt { value }
    }

    #[inline]
    pub fn at(&self, m: u64) -> f64 {
        match *self {
            Schedule::Constant { value } => value,
            Schedule::InverseLog { value } => value / (E + m as f64).ln(),
            Schedule::InverseSqrt { value } => value / (m.max(1) as f64).sqrt(),
        }
    }

    pub fn initial(&self) -> f64 {
        match *self {
            Schedule::Constant { value } | Schedule::InverseLog { value } | Schedule::InverseSqrt { value } => value,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Schedule::Constant { .. })
    }

    /// Whether the schedule tends to zero.
    pub fn decays(&self) -> bool {
        !self.is_constant() && self.initial() != 0.0
    }
}

/// Uniform-exploration weight `min(1, epsilon / ln(e + n))`.
#[inline]
pub fn exploration_weight(epsilon: f64, n: u64) -> f64 {
    (epsilon / (E + n as f64).ln()).min(1.0)
}

/// Running-mean update used for every average-return table.
#[inline]
pub fn running_mean(mean: f64, sample: f64, count: u64) -> f64 {
    mean + (sample - mean) / count as f64
}
