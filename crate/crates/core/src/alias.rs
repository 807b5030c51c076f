//! Walker/Vose alias tables and the per-node cached policy sampler.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Alias table for O(1) categorical sampling after O(m) construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    thresholds: Vec<f64>,
    aliases: Vec<u32>,
}

impl AliasTable {
    /// Builds a table whose sampling distribution is `weights / sum(weights)`.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights);
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidWeights);
        }
        let m = weights.len();
        let scale = m as f64 / total;
        let mut thresholds: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let mut aliases: Vec<u32> = (0..m as u32).collect();

        let mut small = Vec::with_capacity(m);
        let mut large = Vec::with_capacity(m);
        for (i, &t) in thresholds.iter().enumerate() {
            if t < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            aliases[s] = l as u32;
            thresholds[l] -= 1.0 - thresholds[s];
            if thresholds[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Whatever is left over is 1 up to rounding.
        for i in small.into_iter().chain(large) {
            thresholds[i] = 1.0;
            aliases[i] = i as u32;
        }
        Ok(Self { thresholds, aliases })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn aliases(&self) -> impl Iterator<Item = usize> + '_ {
        self.aliases.iter().map(|&a| a as usize)
    }

    /// Category selected by column `index` and uniform draw `x`.
    #[inline]
    pub fn lookup(&self, index: usize, x: f64) -> usize {
        if x < self.thresholds[index] {
            index
        } else {
            self.aliases[index] as usize
        }
    }

    /// One uniform index draw and one uniform real draw.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let index = rng.random_range(0..self.thresholds.len());
        let x: f64 = rng.random();
        self.lookup(index, x)
    }

    /// Exact sampling probability of every category, read back from the table.
    pub fn probabilities(&self) -> Vec<f64> {
        let m = self.len() as f64;
        let mut p = self.thresholds.clone();
        for (j, &a) in self.aliases.iter().enumerate() {
            if a as usize != j {
                p[a as usize] += 1.0 - self.thresholds[j];
            }
        }
        p.iter_mut().for_each(|v| *v /= m);
        p
    }
}

/// Inverse-CDF sample from unnormalised `weights` with a single uniform draw.
pub fn sample_direct<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave `u` at the very top of the range.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// How a node turns its search policy into sampled actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SamplingMode {
    /// Rebuild an alias table every `cadence` visits (`None` means every
    /// `|A|` visits) and sample from the frozen table in between.
    Alias { cadence: Option<u64> },
    /// Recompute the policy on every visit and sample it directly.
    Direct,
}

impl Default for SamplingMode {
    fn default() -> Self {
        SamplingMode::Alias { cadence: None }
    }
}

/// Policy snapshot owned by a search node.
///
/// Between rebuilds the sampled distribution is the one frozen at the last
/// rebuild; [`CachedSampler::weights`] always reports that frozen snapshot.
#[derive(Debug, Clone, Default)]
pub struct CachedSampler {
    weights: Vec<f64>,
    table: Option<AliasTable>,
    refreshed: bool,
    rebuilds: u64,
}

impl CachedSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replace the snapshot with freshly computed `weights`.
    pub fn refresh(&mut self, mode: SamplingMode, fill: impl FnOnce(&mut Vec<f64>)) {
        fill(&mut self.weights);
        self.table = match mode {
            SamplingMode::Alias { .. } => {
                Some(AliasTable::new(&self.weights).expect("search policies are valid distributions"))
            }
            SamplingMode::Direct => None,
        };
        self.refreshed = true;
        self.rebuilds += 1;
    }

    /// Whether a sample at `visits` prior visits must rebuild first.
    pub fn needs_rebuild(&self, visits: u64, num_actions: usize, mode: SamplingMode) -> bool {
        match mode {
            SamplingMode::Direct => true,
            SamplingMode::Alias { cadence } => {
                let every = cadence.unwrap_or(num_actions as u64).max(1);
                self.table.is_none() || visits.is_multiple_of(every)
            }
        }
    }

    /// Samples an action, rebuilding from `fill` when the cadence says so.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        visits: u64,
        num_actions: usize,
        mode: SamplingMode,
        fill: impl FnOnce(&mut Vec<f64>),
        rng: &mut R,
    ) -> usize {
        if self.needs_rebuild(visits, num_actions, mode) {
            self.refresh(mode, fill);
        }
        match &self.table {
            Some(table) => table.sample(rng),
            None => sample_direct(&self.weights, rng),
        }
    }

    /// Frozen policy currently being sampled.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn table(&self) -> Option<&AliasTable> {
        self.table.as_ref()
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// Returns whether the snapshot changed since the last call, then clears the flag.
    pub fn take_refreshed(&mut self) -> bool {
        std::mem::replace(&mut self.refreshed, false)
    }

    pub fn is_built(&self) -> bool {
        !self.weights.is_empty()
    }
}
