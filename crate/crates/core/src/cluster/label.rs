use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{terms, ClusterAssignment, ClusterId};

pub const TOP_TERMS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabel {
    pub cluster_id: ClusterId,
    pub top_terms: Vec<String>,
    pub scores: Vec<f64>,
}

/// Class-based TF-IDF labels: each cluster is one pseudo-document and a term
/// scores `tf × ln(1 + clusters / clusters containing the term)`. Up to three
/// terms per cluster, best first, ties broken alphabetically. Outliers get no
/// label.
pub fn label_clusters(assignments: &[ClusterAssignment], texts: &BTreeMap<String, String>) -> Vec<ClusterLabel> {
    let mut tf: BTreeMap<ClusterId, BTreeMap<String, u64>> = BTreeMap::new();
    for a in assignments {
        if a.cluster_id == ClusterId::Outlier {
            continue;
        }
        let counts = tf.entry(a.cluster_id).or_default();
        for term in texts.get(&a.statement_id).map(|t| terms(t)).unwrap_or_default() {
            *counts.entry(term).or_insert(0) += 1;
        }
    }
    let n_clusters = tf.len() as f64;
    let mut cf: BTreeMap<&str, usize> = BTreeMap::new();
    for counts in tf.values() {
        for term in counts.keys() {
            *cf.entry(term.as_str()).or_insert(0) += 1;
        }
    }
    let unique: BTreeSet<ClusterId> = tf.keys().copied().collect();
    unique
        .into_iter()
        .map(|cluster_id| {
            let mut scored: Vec<(String, f64)> = tf[&cluster_id]
                .iter()
                .map(|(term, &count)| {
                    let score = count as f64 * libm::log(1.0 + n_clusters / cf[term.as_str()] as f64);
                    (term.clone(), score)
                })
                .collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            scored.truncate(TOP_TERMS);
            let (top_terms, scores) = scored.into_iter().unzip();
            ClusterLabel { cluster_id, top_terms, scores }
        })
        .collect()
}
