use alloc::vec::Vec;

use super::{ClusterAssignment, ClusterError, ClusterId, FeatureKind, StatementVector};

pub const DEFAULT_THETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    /// Clusters merge while their average cosine distance is below this.
    pub theta: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams { theta: DEFAULT_THETA }
    }
}

/// Average-linkage agglomerative clustering on cosine distance.
///
/// Vectors are first ordered by statement id. Each step merges the closest
/// pair of clusters; equal distances go to the pair whose smallest member
/// ids come first. Clusters are numbered by their smallest member id, so the
/// result does not depend on input order. Assignments come back sorted by
/// statement id.
pub fn cluster(
    vectors: &[StatementVector],
    feature: FeatureKind,
    params: ClusterParams,
) -> Result<Vec<ClusterAssignment>, ClusterError> {
    let first = vectors.first().ok_or(ClusterError::EmptyInput)?;
    for v in vectors {
        if v.source != first.source {
            return Err(ClusterError::MixedSources);
        }
        if v.vector.len() != first.vector.len() {
            return Err(ClusterError::DimensionMismatch {
                statement_id: v.statement_id.clone(),
                expected: first.vector.len(),
                found: v.vector.len(),
            });
        }
    }
    let mut sorted: Vec<&StatementVector> = vectors.iter().collect();
    sorted.sort_by(|a, b| a.statement_id.cmp(&b.statement_id));
    if let Some(w) = sorted.windows(2).find(|w| w[0].statement_id == w[1].statement_id) {
        return Err(ClusterError::DuplicateId(w[0].statement_id.clone()));
    }

    let n = sorted.len();
    let mut dist = alloc::vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = (1.0 - super::cosine(&sorted[i].vector, &sorted[j].vector)).max(0.0);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let labels = merge(n, &mut dist, params.theta);

    // Slots are indexed by smallest member, so first appearance order is the
    // canonical numbering.
    let mut numbering: Vec<Option<u32>> = alloc::vec![None; n];
    let mut next = 0u32;
    Ok(sorted
        .iter()
        .zip(labels)
        .map(|(v, slot)| {
            let id = *numbering[slot].get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            ClusterAssignment { statement_id: v.statement_id.clone(), feature, cluster_id: ClusterId::Cluster(id) }
        })
        .collect())
}

/// Runs the merges on a full distance matrix and returns, per point, the
/// slot (smallest member index) of its final cluster.
fn merge(n: usize, dist: &mut [f64], theta: f64) -> Vec<usize> {
    let mut size = alloc::vec![1usize; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut owner: Vec<usize> = (0..n).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for &j in &active[ai + 1..] {
                let d = dist[i * n + j];
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((d, i, j)) = best.filter(|(d, _, _)| *d < theta) else { break };
        debug_assert!(d >= 0.0);
        let (si, sj) = (size[i] as f64, size[j] as f64);
        for &k in &active {
            if k != i && k != j {
                let merged = (si * dist[k * n + i] + sj * dist[k * n + j]) / (si + sj);
                dist[k * n + i] = merged;
                dist[i * n + k] = merged;
            }
        }
        size[i] += size[j];
        active.retain(|&k| k != j);
        owner.iter_mut().filter(|o| **o == j).for_each(|o| *o = i);
    }
    owner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::EmbeddingSource;
    use alloc::collections::BTreeSet;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;
    use proptest::prelude::*;

    fn sv(id: &str, v: &[f64]) -> StatementVector {
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        StatementVector {
            statement_id: id.into(),
            vector: v.iter().map(|x| x / norm).collect(),
            source: EmbeddingSource::Imported,
        }
    }

    fn groups(assignments: &[ClusterAssignment]) -> Vec<u32> {
        assignments
            .iter()
            .map(|a| match a.cluster_id {
                ClusterId::Cluster(k) => k,
                ClusterId::Outlier => u32::MAX,
            })
            .collect()
    }

    /// Brute force: recompute average pairwise distance between every pair
    /// of current clusters at each step.
    fn oracle(vectors: &[StatementVector], theta: f64) -> Vec<BTreeSet<String>> {
        let mut sorted: Vec<&StatementVector> = vectors.iter().collect();
        sorted.sort_by(|a, b| a.statement_id.cmp(&b.statement_id));
        let mut clusters: Vec<Vec<usize>> = (0..sorted.len()).map(|i| vec![i]).collect();
        let d = |a: usize, b: usize| (1.0 - crate::cluster::cosine(&sorted[a].vector, &sorted[b].vector)).max(0.0);
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for x in 0..clusters.len() {
                for y in x + 1..clusters.len() {
                    let total: f64 = clusters[x].iter().flat_map(|&a| clusters[y].iter().map(move |&b| (a, b))).map(|(a, b)| d(a, b)).sum();
                    let avg = total / (clusters[x].len() * clusters[y].len()) as f64;
                    if best.is_none_or(|(b, _, _)| avg < b - 1e-12) {
                        best = Some((avg, x, y));
                    }
                }
            }
            match best {
                Some((avg, x, y)) if avg < theta => {
                    let moved = clusters.remove(y);
                    clusters[x].extend(moved);
                }
                _ => break,
            }
        }
        clusters.into_iter().map(|c| c.into_iter().map(|i| sorted[i].statement_id.clone()).collect()).collect()
    }

    fn partition(assignments: &[ClusterAssignment]) -> BTreeSet<BTreeSet<String>> {
        let mut by: alloc::collections::BTreeMap<ClusterId, BTreeSet<String>> = Default::default();
        for a in assignments {
            by.entry(a.cluster_id).or_default().insert(a.statement_id.clone());
        }
        by.into_values().collect()
    }

    #[test]
    fn identical_vectors_form_one_cluster() {
        let vs: Vec<_> = (0..5).map(|i| sv(&format!("s{i}"), &[1.0, 2.0])).collect();
        assert_eq!(groups(&cluster(&vs, FeatureKind::Role, ClusterParams::default()).unwrap()), [0; 5]);
    }

    #[test]
    fn two_separated_groups() {
        // Within-group cosine >= 0.9, across-group <= 0.1.
        let vs = vec![
            sv("a1", &[1.0, 0.05, 0.0]),
            sv("b1", &[0.0, 1.0, 0.05]),
            sv("a2", &[1.0, 0.0, 0.05]),
            sv("b2", &[0.05, 1.0, 0.0]),
            sv("a3", &[1.0, 0.05, 0.05]),
            sv("b3", &[0.0, 1.0, 0.05]),
        ];
        for x in &vs {
            for y in &vs {
                let c = crate::cluster::cosine(&x.vector, &y.vector);
                let same = x.statement_id.as_bytes()[0] == y.statement_id.as_bytes()[0];
                assert!(if same { c >= 0.9 } else { c <= 0.1 });
            }
        }
        let out = cluster(&vs, FeatureKind::Action, ClusterParams::default()).unwrap();
        let ids: Vec<&str> = out.iter().map(|a| a.statement_id.as_str()).collect();
        assert_eq!(ids, ["a1", "a2", "a3", "b1", "b2", "b3"]);
        assert_eq!(groups(&out), [0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn singleton_and_empty() {
        let out = cluster(&[sv("only", &[1.0])], FeatureKind::Object, ClusterParams::default()).unwrap();
        assert_eq!(groups(&out), [0]);
        assert_eq!(cluster(&[], FeatureKind::Object, ClusterParams::default()), Err(ClusterError::EmptyInput));
    }

    #[test]
    fn ties_merge_smallest_ids_first() {
        // b sits exactly halfway between a and c, so (a, b) and (b, c) tie.
        // Whichever merges first leaves the third point above theta.
        let vs = vec![sv("c", &[0.0, 1.0]), sv("b", &[1.0, 1.0]), sv("a", &[1.0, 0.0])];
        let ab = crate::cluster::cosine(&vs[2].vector, &vs[1].vector);
        let bc = crate::cluster::cosine(&vs[1].vector, &vs[0].vector);
        assert_eq!(ab, bc);
        let out = cluster(&vs, FeatureKind::Role, ClusterParams::default()).unwrap();
        assert_eq!(groups(&out), [0, 0, 1]);
    }

    fn vectors() -> impl Strategy<Value = Vec<StatementVector>> {
        prop::collection::vec(prop::collection::vec(0u8..4, 4), 1..14).prop_map(|rows| {
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut v: Vec<f64> = r.iter().map(|&x| f64::from(x)).collect();
                    v[i % 4] += 0.5;
                    sv(&format!("s{i:02}"), &v)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force(vs in vectors(), theta in 0.05f64..0.95) {
            let out = cluster(&vs, FeatureKind::Role, ClusterParams { theta }).unwrap();
            let expected: BTreeSet<BTreeSet<String>> = oracle(&vs, theta).into_iter().collect();
            prop_assert_eq!(partition(&out), expected);
        }

        #[test]
        fn permutation_invariant(vs in vectors(), seed in any::<u64>()) {
            let mut shuffled = vs.clone();
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = crate::seed::splitmix64(s);
                shuffled.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let a = cluster(&vs, FeatureKind::Role, ClusterParams::default()).unwrap();
            let b = cluster(&shuffled, FeatureKind::Role, ClusterParams::default()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
