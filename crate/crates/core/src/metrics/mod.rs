//! Paired change metrics over per-snapshot cluster distributions.

mod bootstrap;
mod rarefaction;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::MetricFeature;
use crate::statement::Snapshot;

pub use bootstrap::{bootstrap_mean_ci, bootstrap_replicate, ci_from_replicates, BootstrapCI, BootstrapConfig};
pub use rarefaction::{rarefied_delta_richness, RarefactionParams};

/// Presence threshold for richness.
pub const DEFAULT_TAU: u64 = 2;
/// Minimum statements per snapshot for entropy and divergence.
pub const MIN_STATEMENTS_H: u64 = 5;
/// Minimum statements per snapshot for richness.
pub const MIN_STATEMENTS_K: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("distribution has no statements")]
    EmptyDistribution,
    #[error("distributions are not aligned on one support")]
    SupportMismatch,
    #[error("no values to aggregate")]
    EmptyValues,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Counts and proportions of one snapshot over a cluster support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDistribution {
    pub repo_id: String,
    pub feature: MetricFeature,
    pub snapshot: Snapshot,
    pub support: Vec<String>,
    pub counts: Vec<u64>,
    pub probs: Vec<f64>,
    pub n: u64,
}

impl FeatureDistribution {
    pub fn from_counts(
        repo_id: &str,
        feature: MetricFeature,
        snapshot: Snapshot,
        support: Vec<String>,
        counts: Vec<u64>,
    ) -> Self {
        assert_eq!(support.len(), counts.len(), "one count per support label");
        let n: u64 = counts.iter().sum();
        let probs = counts.iter().map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect();
        FeatureDistribution { repo_id: repo_id.to_string(), feature, snapshot, support, counts, probs, n }
    }

    /// Distribution of a list of labels over their sorted distinct values.
    pub fn from_labels<'a>(
        repo_id: &str,
        feature: MetricFeature,
        snapshot: Snapshot,
        labels: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let mut tally: BTreeMap<String, u64> = BTreeMap::new();
        for label in labels {
            *tally.entry(label.to_string()).or_insert(0) += 1;
        }
        let (support, counts) = tally.into_iter().unzip();
        FeatureDistribution::from_counts(repo_id, feature, snapshot, support, counts)
    }
}

/// Shannon entropy in bits of a probability vector; zero cells add nothing.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * libm::log2(p)).sum::<f64>()
}

/// Kullback-Leibler divergence in bits; cells with `p = 0` add nothing.
fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| pi * libm::log2(pi / qi)).sum()
}

/// Jensen-Shannon divergence in bits of two aligned probability vectors.
pub fn jsd_bits(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    if p == q {
        return 0.0;
    }
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    // Disjoint supports reach the maximum exactly: every nonzero cell of p
    // and q is twice its mixture cell.
    let disjoint = p.iter().zip(q).all(|(a, b)| *a == 0.0 || *b == 0.0);
    if disjoint {
        return 1.0;
    }
    (0.5 * kl_bits(p, &m) + 0.5 * kl_bits(q, &m)).clamp(0.0, 1.0)
}

pub fn entropy(dist: &FeatureDistribution) -> Result<f64, MetricsError> {
    if dist.n == 0 {
        return Err(MetricsError::EmptyDistribution);
    }
    Ok(entropy_bits(&dist.probs))
}

pub fn delta_entropy(initial: &FeatureDistribution, latest: &FeatureDistribution) -> Result<f64, MetricsError> {
    Ok(entropy(latest)? - entropy(initial)?)
}

/// Divergence between two distributions on the same support. Supports that
/// differ are an error; use [`align`] to pad explicitly.
pub fn jsd(p: &FeatureDistribution, q: &FeatureDistribution) -> Result<f64, MetricsError> {
    if p.support != q.support {
        return Err(MetricsError::SupportMismatch);
    }
    if p.n == 0 || q.n == 0 {
        return Err(MetricsError::EmptyDistribution);
    }
    Ok(jsd_bits(&p.probs, &q.probs))
}

/// Re-expresses both distributions over the sorted union of their supports,
/// with zero counts for labels a side lacks.
pub fn align(p: &FeatureDistribution, q: &FeatureDistribution) -> (FeatureDistribution, FeatureDistribution) {
    let mut union: Vec<String> = p.support.iter().chain(&q.support).cloned().collect();
    union.sort();
    union.dedup();
    let pad = |d: &FeatureDistribution| {
        let counts = union
            .iter()
            .map(|label| d.support.iter().position(|s| s == label).map_or(0, |i| d.counts[i]))
            .collect();
        FeatureDistribution::from_counts(&d.repo_id, d.feature, d.snapshot, union.clone(), counts)
    };
    (pad(p), pad(q))
}

/// Number of clusters with at least `tau` statements.
pub fn richness_counts(counts: &[u64], tau: u64) -> u64 {
    counts.iter().filter(|&&c| c >= tau).count() as u64
}

pub fn richness(dist: &FeatureDistribution, tau: u64) -> u64 {
    richness_counts(&dist.counts, tau)
}

pub fn delta_richness(initial: &FeatureDistribution, latest: &FeatureDistribution, tau: u64) -> i64 {
    richness(latest, tau) as i64 - richness(initial, tau) as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eligibility {
    pub h_jsd: bool,
    pub k: bool,
}

pub fn screen_eligibility(initial: &FeatureDistribution, latest: &FeatureDistribution) -> Eligibility {
    screen_counts(initial.n, latest.n)
}

pub fn screen_counts(n_initial: u64, n_latest: u64) -> Eligibility {
    let both = |min: u64| n_initial >= min && n_latest >= min;
    Eligibility { h_jsd: both(MIN_STATEMENTS_H), k: both(MIN_STATEMENTS_K) }
}

/// All paired metrics of one repository and feature. Values that cannot be
/// computed (an empty snapshot) are `None`; eligibility is reported
/// separately and decides what enters aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedMetrics {
    pub repo_id: String,
    pub feature: MetricFeature,
    pub n_initial: u64,
    pub n_latest: u64,
    pub h_initial: Option<f64>,
    pub h_latest: Option<f64>,
    pub delta_h: Option<f64>,
    pub jsd: Option<f64>,
    pub k_initial: u64,
    pub k_latest: u64,
    pub delta_k: i64,
    pub rarefied_delta_k: Option<f64>,
    pub eligible_h_jsd: bool,
    pub eligible_k: bool,
}

/// Computes every paired metric for one repository and feature.
///
/// `labels_initial` and `labels_latest` are `(statement_id, label)` pairs
/// for rarefaction; they must tally to the two distributions.
pub fn paired_metrics(
    initial: &FeatureDistribution,
    latest: &FeatureDistribution,
    labels_initial: &[(&str, &str)],
    labels_latest: &[(&str, &str)],
    tau: u64,
    rarefaction: &RarefactionParams,
) -> Result<PairedMetrics, MetricsError> {
    if initial.support != latest.support {
        return Err(MetricsError::SupportMismatch);
    }
    let eligibility = screen_eligibility(initial, latest);
    let h_initial = entropy(initial).ok();
    let h_latest = entropy(latest).ok();
    let rarefied = if initial.n > 0 && latest.n > 0 {
        Some(rarefied_delta_richness(labels_initial, labels_latest, tau, rarefaction)?)
    } else {
        None
    };
    Ok(PairedMetrics {
        repo_id: initial.repo_id.clone(),
        feature: initial.feature,
        n_initial: initial.n,
        n_latest: latest.n,
        h_initial,
        h_latest,
        delta_h: h_initial.zip(h_latest).map(|(a, b)| b - a),
        jsd: jsd(initial, latest).ok(),
        k_initial: richness(initial, tau),
        k_latest: richness(latest, tau),
        delta_k: delta_richness(initial, latest, tau),
        rarefied_delta_k: rarefied,
        eligible_h_jsd: eligibility.h_jsd,
        eligible_k: eligibility.k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn dist(counts: &[u64]) -> FeatureDistribution {
        let support = (0..counts.len()).map(|i| format!("{i}")).collect();
        FeatureDistribution::from_counts("r", MetricFeature::Role, Snapshot::Initial, support, counts.to_vec())
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&dist(&[1, 1, 1, 1])).unwrap(), 2.0);
        assert_eq!(entropy(&dist(&[7, 0, 0])).unwrap(), 0.0);
        assert_eq!(entropy(&dist(&[2, 1, 1])).unwrap(), 1.5);
        assert_eq!(entropy(&dist(&[0, 0])), Err(MetricsError::EmptyDistribution));
    }

    #[test]
    fn delta_entropy_examples() {
        let point = dist(&[4, 0, 0, 0]);
        let uniform = dist(&[1, 1, 1, 1]);
        assert_eq!(delta_entropy(&uniform, &uniform).unwrap(), 0.0);
        assert_eq!(delta_entropy(&point, &uniform).unwrap(), 2.0);
        assert_eq!(delta_entropy(&uniform, &point).unwrap(), -2.0);
    }

    #[test]
    fn jsd_examples() {
        assert_eq!(jsd(&dist(&[1, 2]), &dist(&[2, 4])).unwrap(), 0.0);
        assert_eq!(jsd(&dist(&[1, 0]), &dist(&[0, 3])).unwrap(), 1.0);
        // 1.5 - 0.75 * log2(3), evaluated independently.
        assert!((jsd(&dist(&[1, 0]), &dist(&[1, 1])).unwrap() - 0.311_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn jsd_rejects_unaligned_support() {
        let p = FeatureDistribution::from_labels("r", MetricFeature::Role, Snapshot::Initial, ["a", "a"]);
        let q = FeatureDistribution::from_labels("r", MetricFeature::Role, Snapshot::Latest, ["b"]);
        assert_eq!(jsd(&p, &q), Err(MetricsError::SupportMismatch));
        let (p, q) = align(&p, &q);
        assert_eq!(p.support, ["a", "b"]);
        assert_eq!(jsd(&p, &q).unwrap(), 1.0);
    }

    #[test]
    fn richness_examples() {
        assert_eq!(richness_counts(&[3, 1, 2], 2), 2);
        assert_eq!(richness_counts(&[1, 1, 1], 2), 0);
        assert_eq!(richness_counts(&[2], 2), 1);
        let base = dist(&[3, 2, 0, 0]);
        assert_eq!(delta_richness(&base, &base, 2), 0);
        assert_eq!(delta_richness(&base, &dist(&[3, 2, 2, 0]), 2), 1);
        assert_eq!(delta_richness(&base, &dist(&[3, 2, 1, 0]), 2), 0);
    }

    #[test]
    fn eligibility_examples() {
        assert_eq!(screen_counts(5, 5), Eligibility { h_jsd: true, k: true });
        assert_eq!(screen_counts(4, 9), Eligibility { h_jsd: false, k: true });
        assert_eq!(screen_counts(0, 3), Eligibility { h_jsd: false, k: false });
    }

    fn counts() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
        (1usize..12).prop_flat_map(|k| (prop::collection::vec(0u64..20, k), prop::collection::vec(0u64..20, k)))
            .prop_filter("non-empty", |(a, b)| a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0)
    }

    proptest! {
        #[test]
        fn entropy_bounds((a, _) in counts()) {
            let d = dist(&a);
            let h = entropy(&d).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= libm::log2(a.len() as f64) + 1e-12);
            let uniform = dist(&vec![3; a.len()]);
            prop_assert!((entropy(&uniform).unwrap() - libm::log2(a.len() as f64)).abs() < 1e-12);
        }

        #[test]
        fn jsd_properties((a, b) in counts()) {
            let (p, q) = (dist(&a), dist(&b));
            let pq = jsd(&p, &q).unwrap();
            prop_assert!((0.0..=1.0).contains(&pq));
            prop_assert!((pq - jsd(&q, &p).unwrap()).abs() <= 1e-12);
            prop_assert_eq!(jsd(&p, &p).unwrap(), 0.0);
        }

        #[test]
        fn deltas_are_antisymmetric((a, b) in counts(), tau in 1u64..4) {
            let (p, q) = (dist(&a), dist(&b));
            prop_assert_eq!(delta_entropy(&p, &q).unwrap(), -delta_entropy(&q, &p).unwrap());
            prop_assert_eq!(delta_richness(&p, &q, tau), -delta_richness(&q, &p, tau));
        }

        #[test]
        fn richness_grows_as_tau_falls((a, _) in counts(), tau in 2u64..6) {
            prop_assert!(richness_counts(&a, tau - 1) >= richness_counts(&a, tau));
        }
    }
}
