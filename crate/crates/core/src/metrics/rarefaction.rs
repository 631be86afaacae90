use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RarefactionParams {
    /// Upper bound on the per-snapshot sample size.
    pub cap: usize,
    /// Number of paired draws averaged.
    pub repeats: usize,
    pub seed: u64,
    /// Draw with replacement instead of without (sensitivity analysis).
    pub with_replacement: bool,
}

impl Default for RarefactionParams {
    fn default() -> Self {
        RarefactionParams { cap: 100, repeats: 200, seed: 0, with_replacement: false }
    }
}

/// Snapshot labels as dense indices, ordered by statement id.
fn dense<'a>(statements: &[(&'a str, &'a str)], index: &BTreeMap<&'a str, usize>) -> Vec<usize> {
    let mut sorted = statements.to_vec();
    sorted.sort();
    sorted.iter().map(|(_, label)| index[label]).collect()
}

fn sample_richness(
    rng: &mut ChaCha8Rng,
    pool: &mut [usize],
    n: usize,
    with_replacement: bool,
    tally: &mut [u64],
    tau: u64,
) -> i64 {
    tally.iter_mut().for_each(|c| *c = 0);
    let len = pool.len();
    for i in 0..n {
        let label = if with_replacement {
            pool[rng.random_range(0..len as u32) as usize]
        } else {
            // Partial Fisher-Yates: position i receives a uniform pick from
            // the not-yet-drawn tail.
            let j = i + rng.random_range(0..(len - i) as u32) as usize;
            pool.swap(i, j);
            pool[i]
        };
        tally[label] += 1;
    }
    tally.iter().filter(|&&c| c >= tau).count() as i64
}

/// Mean paired richness change over equal-size subsamples.
///
/// Each snapshot is given as `(statement_id, cluster label)` pairs. The
/// sample size is `min(N_initial, N_latest, cap)`; every repeat draws that
/// many statements from each snapshot and differences their richness at
/// `tau`. Statements are ordered by id and the random stream is seeded from
/// `params.seed` and those ids, so input order does not matter.
pub fn rarefied_delta_richness(
    initial: &[(&str, &str)],
    latest: &[(&str, &str)],
    tau: u64,
    params: &RarefactionParams,
) -> Result<f64, MetricsError> {
    if params.cap == 0 || params.repeats == 0 {
        return Err(MetricsError::InvalidParameter(format!(
            "rarefaction needs cap >= 1 and repeats >= 1, got cap={} repeats={}",
            params.cap, params.repeats
        )));
    }
    if initial.is_empty() || latest.is_empty() {
        return Err(MetricsError::EmptyDistribution);
    }
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, label) in initial.iter().chain(latest) {
        let next = index.len();
        index.entry(label).or_insert(next);
    }
    let mut pool_initial = dense(initial, &index);
    let mut pool_latest = dense(latest, &index);
    let n_r = params.cap.min(initial.len()).min(latest.len());

    let mut ids: Vec<&str> = initial.iter().chain(latest).map(|(id, _)| *id).collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive(params.seed, ids));

    let mut tally = alloc::vec![0u64; index.len()];
    let mut total: i64 = 0;
    for _ in 0..params.repeats {
        let k_initial = sample_richness(&mut rng, &mut pool_initial, n_r, params.with_replacement, &mut tally, tau);
        let k_latest = sample_richness(&mut rng, &mut pool_latest, n_r, params.with_replacement, &mut tally, tau);
        total += k_latest - k_initial;
    }
    Ok(total as f64 / params.repeats as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;
    use proptest::prelude::*;

    fn labeled<'a>(prefix: &str, labels: &[&'a str]) -> Vec<(String, &'a str)> {
        labels.iter().enumerate().map(|(i, l)| (format!("{prefix}{i}"), *l)).collect()
    }

    fn view<'a>(v: &'a [(String, &'a str)]) -> Vec<(&'a str, &'a str)> {
        v.iter().map(|(id, l)| (id.as_str(), *l)).collect()
    }

    fn richness(labels: &[&str], tau: u64) -> i64 {
        let mut tally: BTreeMap<&str, u64> = BTreeMap::new();
        labels.iter().for_each(|l| *tally.entry(l).or_insert(0) += 1);
        tally.values().filter(|&&c| c >= tau).count() as i64
    }

    /// Exact expectation by enumerating every pair of subsets of size n.
    fn enumerate(initial: &[&str], latest: &[&str], n: usize, tau: u64) -> f64 {
        let subsets = |labels: &[&str]| -> Vec<i64> {
            (0u32..1 << labels.len())
                .filter(|m| m.count_ones() as usize == n)
                .map(|m| {
                    let pick: Vec<&str> = (0..labels.len()).filter(|i| m >> i & 1 == 1).map(|i| labels[i]).collect();
                    richness(&pick, tau)
                })
                .collect()
        };
        let (a, b) = (subsets(initial), subsets(latest));
        let mean = |v: &[i64]| v.iter().sum::<i64>() as f64 / v.len() as f64;
        mean(&b) - mean(&a)
    }

    #[test]
    fn full_samples_equal_plain_delta() {
        let init = labeled("i", &["a", "a", "a", "a"]);
        let latest = labeled("l", &["a", "a", "b", "b"]);
        let params = RarefactionParams { repeats: 50, ..Default::default() };
        assert_eq!(rarefied_delta_richness(&view(&init), &view(&latest), 2, &params).unwrap(), 1.0);
        assert_eq!(enumerate(&["a"; 4], &["a", "a", "b", "b"], 4, 2), 1.0);
    }

    #[test]
    fn identical_snapshots_average_zero() {
        let labels = ["a", "a", "b", "b", "b", "c", "d", "d"];
        let (init, latest) = (labeled("i", &labels), labeled("l", &labels));
        let params = RarefactionParams { cap: 5, repeats: 10_000, seed: 11, with_replacement: false };
        let got = rarefied_delta_richness(&view(&init), &view(&latest), 2, &params).unwrap();
        assert!(got.abs() <= 0.05, "{got}");
    }

    #[test]
    fn input_order_does_not_matter() {
        let init = labeled("i", &["a", "b", "b", "c", "c", "c"]);
        let latest = labeled("l", &["a", "a", "d", "d", "e"]);
        let params = RarefactionParams { cap: 3, repeats: 300, seed: 5, with_replacement: false };
        let forward = rarefied_delta_richness(&view(&init), &view(&latest), 2, &params).unwrap();
        let mut reversed_init = view(&init);
        reversed_init.reverse();
        let mut reversed_latest = view(&latest);
        reversed_latest.reverse();
        assert_eq!(rarefied_delta_richness(&reversed_init, &reversed_latest, 2, &params).unwrap(), forward);
    }

    #[test]
    fn invalid_parameters() {
        let init = labeled("i", &["a"]);
        let bad = RarefactionParams { cap: 0, ..Default::default() };
        assert!(rarefied_delta_richness(&view(&init), &view(&init), 2, &bad).is_err());
        assert_eq!(
            rarefied_delta_richness(&view(&init), &[], 2, &RarefactionParams::default()),
            Err(MetricsError::EmptyDistribution)
        );
    }

    #[test]
    fn with_replacement_runs() {
        let init = labeled("i", &["a", "a", "b"]);
        let params = RarefactionParams { with_replacement: true, repeats: 100, ..Default::default() };
        let got = rarefied_delta_richness(&view(&init), &view(&init), 2, &params).unwrap();
        assert!(got.abs() < 0.5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_enumeration(
            init in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 1..=8),
            latest in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "e"]), 1..=8),
            cap in 1usize..=8,
            seed in any::<u64>(),
        ) {
            let n = cap.min(init.len()).min(latest.len());
            let expected = enumerate(&init, &latest, n, 2);
            let (i, l) = (labeled("i", &init), labeled("l", &latest));
            let params = RarefactionParams { cap, repeats: 10_000, seed, with_replacement: false };
            let got = rarefied_delta_richness(&view(&i), &view(&l), 2, &params).unwrap();
            prop_assert!((got - expected).abs() <= 0.05, "got {} expected {}", got, expected);
        }
    }
}
