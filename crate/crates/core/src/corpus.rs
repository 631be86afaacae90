//! Snapshot pairing and corpus coverage statistics.
//!
//! Everything here works on data the caller has already pulled out of
//! version control; the `govtrace` crate does the git plumbing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::text::{segment, Normalizer};

/// A governance file found at a repository root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GovernanceFileRecord {
    pub repo_id: String,
    pub path: String,
    pub matched_pattern: String,
}

impl GovernanceFileRecord {
    /// Returns `None` when `path` is not a root-level entry.
    pub fn new(repo_id: &str, path: &str, matched_pattern: &str) -> Option<Self> {
        if path.is_empty() || path.contains('/') || path.contains('\\') {
            return None;
        }
        Some(GovernanceFileRecord {
            repo_id: repo_id.to_string(),
            path: path.to_string(),
            matched_pattern: matched_pattern.to_string(),
        })
    }
}

/// Ordering used for governance paths everywhere: case-folded first, raw
/// bytes as the tie-break so the order is total.
pub fn path_order(a: &str, b: &str) -> core::cmp::Ordering {
    let fold = |s: &str| s.chars().flat_map(char::to_lowercase).collect::<String>();
    fold(a).cmp(&fold(b)).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GovernanceSnapshot {
    pub repo_id: String,
    pub commit_id: String,
    pub commit_date: NaiveDate,
    pub raw_text: String,
    pub file_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotPair {
    pub repo_id: String,
    pub initial: GovernanceSnapshot,
    pub latest: GovernanceSnapshot,
    pub gap_days: i64,
    pub across_day: bool,
}

impl SnapshotPair {
    /// Builds a pair, deriving the gap and across-day flag from the dates.
    pub fn new(initial: GovernanceSnapshot, latest: GovernanceSnapshot) -> Option<Self> {
        if initial.commit_id == latest.commit_id || initial.commit_date > latest.commit_date {
            return None;
        }
        let gap_days = (latest.commit_date - initial.commit_date).num_days();
        Some(SnapshotPair {
            repo_id: initial.repo_id.clone(),
            initial,
            latest,
            gap_days,
            across_day: gap_days >= 1,
        })
    }
}

/// One commit that modified at least one matched governance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitTouch {
    pub repo_id: String,
    pub commit_id: String,
    /// Committer timestamp, seconds since the Unix epoch.
    pub timestamp: i64,
    /// UTC calendar date of `timestamp`.
    pub date: NaiveDate,
    pub additions: u64,
    pub deletions: u64,
}

/// Why a repository did not yield a snapshot pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    NoGovernanceFile,
    NoValidSnapshot,
    SingleSnapshot,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::NoGovernanceFile => "no-governance-file",
            ExclusionReason::NoValidSnapshot => "no-valid-snapshot",
            ExclusionReason::SingleSnapshot => "single-snapshot",
        }
    }
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub repo_id: String,
    pub reason: ExclusionReason,
}

/// Chooses the earliest and latest valid snapshots from a commit list.
///
/// `touches` must be sorted oldest first (see [`sort_touches`]). Snapshots
/// are loaded lazily: the search walks forward for the first valid commit and
/// backward for the last one, so only a handful of blobs are read on long
/// histories.
pub fn recover_pair<E>(
    repo_id: &str,
    touches: &[CommitTouch],
    mut snapshot_at: impl FnMut(&CommitTouch) -> Result<GovernanceSnapshot, E>,
    is_valid: impl Fn(&GovernanceSnapshot) -> bool,
) -> Result<Result<SnapshotPair, ExclusionReason>, E> {
    let distinct: BTreeSet<&str> = touches.iter().map(|t| t.commit_id.as_str()).collect();
    match distinct.len() {
        0 => return Ok(Err(ExclusionReason::NoGovernanceFile)),
        1 => return Ok(Err(ExclusionReason::SingleSnapshot)),
        _ => {}
    }

    let mut initial = None;
    for (idx, touch) in touches.iter().enumerate() {
        let snapshot = snapshot_at(touch)?;
        if is_valid(&snapshot) {
            initial = Some((idx, snapshot));
            break;
        }
    }
    let Some((first_idx, initial)) = initial else {
        log::info!("{repo_id}: no valid governance snapshot");
        return Ok(Err(ExclusionReason::NoValidSnapshot));
    };

    for touch in touches[first_idx + 1..].iter().rev() {
        if touch.commit_id == initial.commit_id {
            continue;
        }
        let snapshot = snapshot_at(touch)?;
        if is_valid(&snapshot) {
            return Ok(SnapshotPair::new(initial, snapshot).ok_or(ExclusionReason::SingleSnapshot));
        }
    }
    Ok(Err(ExclusionReason::SingleSnapshot))
}

/// Sorts commit touches oldest first by committer timestamp. Ties keep their
/// incoming relative order, so pass history in oldest-first log order.
pub fn sort_touches(touches: &mut [CommitTouch]) {
    touches.sort_by_key(|t| t.timestamp);
}

/// A snapshot is valid when its normalized text is non-empty and contains at
/// least one sentence.
pub fn is_valid_snapshot(normalizer: &Normalizer, raw_text: &str) -> bool {
    if raw_text.trim().is_empty() {
        return false;
    }
    let doc = normalizer.normalize(raw_text);
    !doc.text.trim().is_empty() && !segment(&doc, normalizer.abbreviations()).is_empty()
}

/// Concatenates the governance files present at one commit.
///
/// Files are ordered by [`path_order`] and separated by a blank line. A
/// paragraph block of a later file is dropped when its whitespace-normalized
/// form already appeared in an earlier file. A single file is returned
/// unchanged.
pub fn build_composite_view(files: &[(String, String)]) -> String {
    if let [(_, text)] = files {
        return text.clone();
    }
    let mut ordered: Vec<&(String, String)> = files.iter().collect();
    ordered.sort_by(|a, b| path_order(&a.0, &b.0));

    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut parts: Vec<String> = Vec::with_capacity(ordered.len());
    for (_, text) in ordered {
        let blocks = split_blocks(text);
        let mut kept = Vec::with_capacity(blocks.len());
        let mut dropped_any = false;
        for block in &blocks {
            if seen.contains(&block_key(block)) {
                dropped_any = true;
            } else {
                kept.push(*block);
            }
        }
        seen.extend(blocks.iter().map(|b| block_key(b)));

        let part = if dropped_any {
            kept.join("\n\n")
        } else {
            text.trim_end_matches(['\n', '\r']).to_string()
        };
        if !part.trim().is_empty() {
            parts.push(part);
        }
    }
    parts.join("\n\n")
}

fn split_blocks(text: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut start: Option<usize> = None;
    let mut end = 0;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let content = line.trim_end_matches(['\n', '\r']);
        if content.trim().is_empty() {
            if let Some(s) = start.take() {
                blocks.push(&text[s..end]);
            }
        } else {
            if start.is_none() {
                start = Some(offset);
            }
            end = offset + content.len();
        }
        offset += line.len();
    }
    if let Some(s) = start {
        blocks.push(&text[s..end]);
    }
    blocks
}

fn block_key(block: &str) -> String {
    block.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Coverage statistics over one corpus run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_repos: usize,
    pub n_paired: usize,
    pub n_across_day: usize,
    pub gap_median_days: Option<i64>,
    pub gap_q1_days: Option<i64>,
    pub gap_q3_days: Option<i64>,
    pub gap_iqr_days: Option<i64>,
    pub gap_min_days: Option<i64>,
    pub gap_max_days: Option<i64>,
    pub filename_histogram: BTreeMap<String, usize>,
    pub exclusion_counts: BTreeMap<String, usize>,
    /// Repository-by-commit pairs touching governance files.
    pub n_governance_commits: usize,
    pub n_unique_commits: usize,
    pub additions: u64,
    pub deletions: u64,
}

pub fn corpus_stats(
    records: &[GovernanceFileRecord],
    pairs: &[SnapshotPair],
    exclusions: &[Exclusion],
    touches: &[CommitTouch],
) -> CorpusStats {
    let mut gaps: Vec<i64> = pairs.iter().map(|p| p.gap_days).collect();
    gaps.sort_unstable();

    let mut filename_histogram = BTreeMap::new();
    for record in records {
        *filename_histogram.entry(record.matched_pattern.clone()).or_insert(0) += 1;
    }
    let mut exclusion_counts = BTreeMap::new();
    for exclusion in exclusions {
        *exclusion_counts.entry(exclusion.reason.as_str().to_string()).or_insert(0) += 1;
    }
    let repo_commits: BTreeSet<(&str, &str)> = touches
        .iter()
        .map(|t| (t.repo_id.as_str(), t.commit_id.as_str()))
        .collect();
    let unique: BTreeSet<&str> = touches.iter().map(|t| t.commit_id.as_str()).collect();

    let q1 = nearest_rank(&gaps, 0.25);
    let q3 = nearest_rank(&gaps, 0.75);
    CorpusStats {
        n_repos: pairs.len() + exclusions.len(),
        n_paired: pairs.len(),
        n_across_day: pairs.iter().filter(|p| p.across_day).count(),
        gap_median_days: lower_median(&gaps),
        gap_q1_days: q1,
        gap_q3_days: q3,
        gap_iqr_days: q1.zip(q3).map(|(lo, hi)| hi - lo),
        gap_min_days: gaps.first().copied(),
        gap_max_days: gaps.last().copied(),
        filename_histogram,
        exclusion_counts,
        n_governance_commits: repo_commits.len(),
        n_unique_commits: unique.len(),
        additions: touches.iter().map(|t| t.additions).sum(),
        deletions: touches.iter().map(|t| t.deletions).sum(),
    }
}

/// Median of sorted values; the lower middle element when `n` is even.
pub fn lower_median<T: Copy>(sorted: &[T]) -> Option<T> {
    if sorted.is_empty() {
        None
    } else {
        Some(sorted[(sorted.len() - 1) / 2])
    }
}

/// Nearest-rank quantile of sorted values: the element of rank `ceil(q n)`,
/// clamped to `1..=n`.
pub fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> Option<T> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    // The epsilon absorbs representation error such as 0.975 * 10000.
    let rank = libm::ceil(q * n as f64 - 1e-9).max(1.0) as usize;
    Some(sorted[rank.min(n) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn touch(id: &str, ts: i64, day: &str) -> CommitTouch {
        CommitTouch {
            repo_id: "r".into(),
            commit_id: id.into(),
            timestamp: ts,
            date: date(day),
            additions: 1,
            deletions: 0,
        }
    }

    fn snap(t: &CommitTouch, text: &str) -> GovernanceSnapshot {
        GovernanceSnapshot {
            repo_id: t.repo_id.clone(),
            commit_id: t.commit_id.clone(),
            commit_date: t.date,
            raw_text: text.into(),
            file_count: 1,
        }
    }

    fn pair_of(touches: &[CommitTouch], texts: &[&str]) -> Result<SnapshotPair, ExclusionReason> {
        let lookup = |t: &CommitTouch| -> Result<GovernanceSnapshot, ()> {
            let idx = touches.iter().position(|x| x.commit_id == t.commit_id).unwrap();
            Ok(snap(t, texts[idx]))
        };
        recover_pair("r", touches, lookup, |s| !s.raw_text.trim().is_empty()).unwrap()
    }

    #[test]
    fn multi_day_pair_has_gap_two() {
        let touches = [touch("a", 100, "2014-03-26"), touch("b", 200_000, "2014-03-28")];
        let pair = pair_of(&touches, &["x", "y"]).unwrap();
        assert_eq!(pair.gap_days, 2);
        assert!(pair.across_day);
        assert_eq!(pair.initial.commit_id, "a");
        assert_eq!(pair.latest.commit_id, "b");
    }

    #[test]
    fn same_day_pair_is_within_day() {
        let touches = [touch("a", 100, "2020-01-01"), touch("b", 200, "2020-01-01")];
        let pair = pair_of(&touches, &["x", "y"]).unwrap();
        assert_eq!(pair.gap_days, 0);
        assert!(!pair.across_day);
    }

    #[test]
    fn single_commit_is_excluded() {
        let touches = [touch("a", 100, "2020-01-01")];
        assert_eq!(pair_of(&touches, &["x"]), Err(ExclusionReason::SingleSnapshot));
        assert_eq!(pair_of(&[], &[]), Err(ExclusionReason::NoGovernanceFile));
    }

    #[test]
    fn invalid_snapshots_are_skipped_at_both_ends() {
        let touches = [
            touch("a", 1, "2020-01-01"),
            touch("b", 2, "2020-01-02"),
            touch("c", 3, "2020-01-03"),
            touch("d", 4, "2020-01-04"),
        ];
        let pair = pair_of(&touches, &[" ", "x", "y", ""]).unwrap();
        assert_eq!((pair.initial.commit_id.as_str(), pair.latest.commit_id.as_str()), ("b", "c"));
        assert_eq!(pair_of(&touches, &["", "x", "", ""]), Err(ExclusionReason::SingleSnapshot));
        assert_eq!(pair_of(&touches, &["", "", "", ""]), Err(ExclusionReason::NoValidSnapshot));
    }

    #[test]
    fn composite_of_single_file_is_identity() {
        let text = "# Title\n\nSame.\n\nSame.\n";
        let files = vec![("GOVERNANCE.md".into(), text.to_string())];
        let out = build_composite_view(&files);
        assert_eq!(out, text);
        assert_eq!(build_composite_view(&[("x".into(), out.clone())]), out);
    }

    #[test]
    fn composite_orders_by_path_and_drops_shared_blocks() {
        let license = "Licensed under the Apache License,\nVersion 2.0.";
        let files = vec![
            ("b.md".to_string(), alloc::format!("Beta rules.\n\n{license}\n")),
            ("a.md".to_string(), alloc::format!("Alpha rules.\n\n{license}\n")),
        ];
        let out = build_composite_view(&files);
        assert_eq!(out, alloc::format!("Alpha rules.\n\n{license}\n\nBeta rules."));
        // Exact string-set membership oracle: every kept block is unique.
        let blocks: Vec<&str> = out.split("\n\n").collect();
        let unique: BTreeSet<&str> = blocks.iter().copied().collect();
        assert_eq!(blocks.len(), unique.len());
        assert_eq!(out.matches("Apache License").count(), 1);
    }

    #[test]
    fn gap_quantiles() {
        assert_eq!(lower_median(&[0, 0, 247]), Some(0));
        assert_eq!(lower_median(&[1, 2, 3, 4]), Some(2));
        assert_eq!(nearest_rank(&[1, 2, 3, 4], 0.25), Some(1));
        assert_eq!(nearest_rank(&[1, 2, 3, 4], 0.75), Some(3));
        assert_eq!(nearest_rank::<i64>(&[], 0.5), None);
        let replicates: Vec<u32> = (1..=10_000).collect();
        assert_eq!(nearest_rank(&replicates, 0.025), Some(250));
        assert_eq!(nearest_rank(&replicates, 0.975), Some(9750));
    }

    #[test]
    fn stats_count_across_day_pairs() {
        let mk = |id: &str, d0: &str, d1: &str| {
            let t0 = CommitTouch { repo_id: id.into(), ..touch("a", 1, d0) };
            let t1 = CommitTouch { repo_id: id.into(), ..touch("b", 2, d1) };
            SnapshotPair::new(snap(&t0, "x"), snap(&t1, "y")).unwrap()
        };
        let pairs = vec![
            mk("r1", "2020-01-01", "2020-09-04"),
            mk("r2", "2020-01-01", "2020-01-01"),
            mk("r3", "2020-01-01", "2020-01-01"),
        ];
        let exclusions = vec![Exclusion { repo_id: "r4".into(), reason: ExclusionReason::SingleSnapshot }];
        let stats = corpus_stats(&[], &pairs, &exclusions, &[]);
        assert_eq!(stats.n_repos, 4);
        assert_eq!(stats.n_paired, 3);
        assert_eq!(stats.n_across_day, 1);
        assert_eq!(stats.gap_median_days, Some(0));
        assert_eq!(stats.gap_max_days, Some(247));
        assert_eq!(stats.exclusion_counts["single-snapshot"], 1);
    }

    #[test]
    fn empty_corpus_has_absent_quantiles() {
        let stats = corpus_stats(&[], &[], &[], &[]);
        assert_eq!(stats.n_repos, 0);
        assert_eq!(stats.gap_median_days, None);
        assert_eq!(stats.gap_iqr_days, None);
    }

    #[test]
    fn records_must_be_root_level() {
        assert!(GovernanceFileRecord::new("r", "docs/GOVERNANCE.md", "p").is_none());
        assert!(GovernanceFileRecord::new("r", "GOVERNANCE.md", "p").is_some());
    }
}
