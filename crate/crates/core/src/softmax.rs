//! Max-shifted softmax kernel shared by every Boltzmann policy and soft backup.

use crate::error::{Error, Result};

/// `temperature * log(sum(exp(x / temperature)))`, computed with the max shift.
pub fn log_sum_exp(values: &[f64], temperature: f64) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| ((v - max) / temperature).exp()).sum();
    temperature * sum.ln() + max
}

/// Writes `softmax(logits / temperature)` into `out`.
///
/// Inputs are assumed finite; see [`boltzmann_weights`] for the checked form.
pub fn softmax_into(logits: &[f64], temperature: f64, out: &mut Vec<f64>) {
    out.clear();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for &l in logits {
        let w = ((l - max) / temperature).exp();
        sum += w;
        out.push(w);
    }
    for w in out.iter_mut() {
        *w /= sum;
    }
}

/// Replaces `values` by `softmax(values / temperature)`.
pub fn softmax_in_place(values: &mut [f64], temperature: f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = ((*v - max) / temperature).exp();
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
}

/// Boltzmann distribution over `logits` at `temperature`.
pub fn boltzmann_weights(logits: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidTemperature(temperature));
    }
    if logits.is_empty() || logits.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFiniteLogits);
    }
    let mut out = Vec::with_capacity(logits.len());
    softmax_into(logits, temperature, &mut out);
    Ok(out)
}

/// Shannon entropy in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}
