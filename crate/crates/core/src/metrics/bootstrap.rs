use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::corpus::nearest_rank;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of replicates.
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { b: 10_000, alpha: 0.05, seed: 0 }
    }
}

impl BootstrapConfig {
    fn validate(&self) -> Result<(), MetricsError> {
        if self.b == 0 || !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(MetricsError::InvalidParameter(format!(
                "bootstrap needs B >= 1 and 0 < alpha < 1, got B={} alpha={}",
                self.b, self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub b: usize,
    pub alpha: f64,
}

/// Mean computed around the first value, so constant inputs reproduce their
/// value exactly.
fn shifted_mean(shift: f64, values: impl Iterator<Item = f64>, n: usize) -> f64 {
    shift + values.map(|v| v - shift).sum::<f64>() / n as f64
}

/// Replicate `index`: the mean of `values.len()` repositories drawn with
/// replacement. Each replicate has its own seeded stream, so replicates can
/// be computed in any order or in parallel.
pub fn bootstrap_replicate(values: &[f64], seed: u64, index: u64) -> f64 {
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::mix(seed, index));
    let draws = (0..n).map(|_| values[rng.random_range(0..n as u32) as usize]);
    shifted_mean(values[0], draws, n)
}

/// Percentile interval from precomputed replicates (nearest rank).
pub fn ci_from_replicates(values: &[f64], mut replicates: Vec<f64>, config: &BootstrapConfig) -> Result<BootstrapCI, MetricsError> {
    if values.is_empty() || replicates.is_empty() {
        return Err(MetricsError::EmptyValues);
    }
    config.validate()?;
    replicates.sort_by(f64::total_cmp);
    let lo = nearest_rank(&replicates, config.alpha / 2.0).unwrap_or(f64::NAN);
    let hi = nearest_rank(&replicates, 1.0 - config.alpha / 2.0).unwrap_or(f64::NAN);
    Ok(BootstrapCI {
        mean: shifted_mean(values[0], values.iter().copied(), values.len()),
        lo,
        hi,
        n: values.len(),
        b: replicates.len(),
        alpha: config.alpha,
    })
}

/// Equal-weight repository bootstrap of the mean with a percentile interval.
pub fn bootstrap_mean_ci(values: &[f64], config: &BootstrapConfig) -> Result<BootstrapCI, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyValues);
    }
    config.validate()?;
    let replicates = (0..config.b as u64).map(|r| bootstrap_replicate(values, config.seed, r)).collect();
    ci_from_replicates(values, replicates, config)
}
