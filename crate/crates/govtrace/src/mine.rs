//! Governance file discovery and snapshot pairing over git histories.

use globset::GlobMatcher;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use govtrace_core::corpus::{
    self, build_composite_view, path_order, recover_pair, sort_touches, CommitTouch, CorpusStats, Exclusion,
    ExclusionReason, GovernanceFileRecord, GovernanceSnapshot, SnapshotPair,
};
use govtrace_core::text::Normalizer;

use crate::config::RepoEntry;
use crate::error::GitError;
use crate::git::GitRepo;

/// Ordered, case-insensitive file name globs.
#[derive(Debug, Clone)]
pub struct PatternSet {
    patterns: Vec<(String, GlobMatcher)>,
}

impl PatternSet {
    pub fn parse(source: &str) -> Result<Self, String> {
        let mut patterns = Vec::new();
        for (line, pattern) in govtrace_core::config_lines(source) {
            if pattern.contains('/') {
                return Err(format!("line {line}: patterns match root-level names only, got {pattern:?}"));
            }
            let glob = globset::GlobBuilder::new(pattern)
                .case_insensitive(true)
                .literal_separator(true)
                .build()
                .map_err(|e| format!("line {line}: {e}"))?;
            patterns.push((pattern.to_string(), glob.compile_matcher()));
        }
        if patterns.is_empty() {
            return Err("no patterns".into());
        }
        Ok(PatternSet { patterns })
    }

    pub fn from_globs<'a>(globs: impl IntoIterator<Item = &'a str>) -> Result<Self, String> {
        PatternSet::parse(&globs.into_iter().collect::<Vec<_>>().join("\n"))
    }

    /// The first pattern matching `name`.
    pub fn matching(&self, name: &str) -> Option<&str> {
        self.patterns.iter().find(|(_, m)| m.is_match(name)).map(|(p, _)| p.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(|(p, _)| p.as_str())
    }
}

/// Root-level files anywhere in `HEAD`'s history whose names match a
/// pattern, in case-folded lexicographic order.
pub fn discover_governance_files(repo: &GitRepo, patterns: &PatternSet) -> Result<Vec<GovernanceFileRecord>, GitError> {
    let mut records: Vec<GovernanceFileRecord> = repo
        .root_paths_in_history()?
        .into_iter()
        .filter_map(|path| {
            let pattern = patterns.matching(&path)?;
            GovernanceFileRecord::new(repo.repo_id(), &path, pattern)
        })
        .collect();
    records.sort_by(|a, b| path_order(&a.path, &b.path));
    Ok(records)
}

/// Commits that modified any discovered file, oldest first by committer
/// time, with line counts restricted to those files.
pub fn list_governance_commits(repo: &GitRepo, records: &[GovernanceFileRecord]) -> Result<Vec<CommitTouch>, GitError> {
    let paths: Vec<String> = records.iter().map(|r| r.path.clone()).collect();
    let mut touches = repo.touches(&paths)?;
    sort_touches(&mut touches);
    Ok(touches)
}

/// The composite governance text at one commit.
pub fn snapshot_at(repo: &GitRepo, records: &[GovernanceFileRecord], touch: &CommitTouch) -> Result<GovernanceSnapshot, GitError> {
    let present = repo.root_files_at(&touch.commit_id)?;
    let mut files = Vec::new();
    for record in records.iter().filter(|r| present.contains(&r.path)) {
        files.push((record.path.clone(), repo.read_file(&touch.commit_id, &record.path)?));
    }
    let raw_text = if files.is_empty() { String::new() } else { build_composite_view(&files) };
    Ok(GovernanceSnapshot {
        repo_id: repo.repo_id().to_string(),
        commit_id: touch.commit_id.clone(),
        commit_date: touch.date,
        raw_text,
        file_count: files.len().max(1),
    })
}

/// Mining outcome of one repository, one line of `pairs.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub repo_id: String,
    pub files: Vec<GovernanceFileRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exclusion: Option<ExclusionReason>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub initial: Option<GovernanceSnapshot>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub latest: Option<GovernanceSnapshot>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gap_days: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub across_day: Option<bool>,
}

impl PairRecord {
    fn paired(files: Vec<GovernanceFileRecord>, pair: SnapshotPair) -> Self {
        PairRecord {
            repo_id: pair.repo_id,
            files,
            exclusion: None,
            initial: Some(pair.initial),
            latest: Some(pair.latest),
            gap_days: Some(pair.gap_days),
            across_day: Some(pair.across_day),
        }
    }

    fn excluded(repo_id: &str, files: Vec<GovernanceFileRecord>, reason: ExclusionReason) -> Self {
        PairRecord {
            repo_id: repo_id.to_string(),
            files,
            exclusion: Some(reason),
            initial: None,
            latest: None,
            gap_days: None,
            across_day: None,
        }
    }

    pub fn pair(&self) -> Option<SnapshotPair> {
        let (initial, latest) = (self.initial.clone()?, self.latest.clone()?);
        SnapshotPair::new(initial, latest)
    }
}

/// Everything mined from one repository.
#[derive(Debug, Clone)]
pub struct RepoMining {
    pub record: PairRecord,
    pub touches: Vec<CommitTouch>,
}

pub fn mine_repo(entry: &RepoEntry, patterns: &PatternSet, normalizer: &Normalizer) -> Result<RepoMining, GitError> {
    let repo = GitRepo::open(&entry.repo_id, &entry.path)?;
    let files = discover_governance_files(&repo, patterns)?;
    if files.is_empty() {
        let record = PairRecord::excluded(&entry.repo_id, files, ExclusionReason::NoGovernanceFile);
        return Ok(RepoMining { record, touches: Vec::new() });
    }
    let touches = list_governance_commits(&repo, &files)?;
    let outcome = recover_pair(
        &entry.repo_id,
        &touches,
        |touch| snapshot_at(&repo, &files, touch),
        |snapshot| corpus::is_valid_snapshot(normalizer, &snapshot.raw_text),
    )?;
    let record = match outcome {
        Ok(pair) => PairRecord::paired(files, pair),
        Err(reason) => PairRecord::excluded(&entry.repo_id, files, reason),
    };
    Ok(RepoMining { record, touches })
}

#[derive(Debug, Clone)]
pub struct CorpusMining {
    /// One record per repository, ordered by repository id.
    pub records: Vec<PairRecord>,
    pub stats: CorpusStats,
}

/// Mines every repository in parallel. Any git failure fails the whole
/// stage, naming every repository that could not be read.
pub fn mine_corpus(
    repos: &[RepoEntry],
    patterns: &PatternSet,
    normalizer: &Normalizer,
) -> Result<CorpusMining, Vec<GitError>> {
    let results: Vec<Result<RepoMining, GitError>> =
        repos.par_iter().map(|entry| mine_repo(entry, patterns, normalizer)).collect();
    let (mut ok, mut failed) = (Vec::new(), Vec::new());
    for result in results {
        match result {
            Ok(mining) => ok.push(mining),
            Err(err) => failed.push(err),
        }
    }
    if !failed.is_empty() {
        return Err(failed);
    }
    ok.sort_by(|a, b| a.record.repo_id.cmp(&b.record.repo_id));
    let files: Vec<GovernanceFileRecord> = ok.iter().flat_map(|m| m.record.files.iter().cloned()).collect();
    let pairs: Vec<SnapshotPair> = ok.iter().filter_map(|m| m.record.pair()).collect();
    let exclusions: Vec<Exclusion> = ok
        .iter()
        .filter_map(|m| m.record.exclusion.map(|reason| Exclusion { repo_id: m.record.repo_id.clone(), reason }))
        .collect();
    let touches: Vec<CommitTouch> = ok.iter().flat_map(|m| m.touches.iter().cloned()).collect();
    let stats = corpus::corpus_stats(&files, &pairs, &exclusions, &touches);
    Ok(CorpusMining { records: ok.into_iter().map(|m| m.record).collect(), stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_are_case_insensitive_and_ordered() {
        let set = PatternSet::from_globs(["governance.md", "*governance*"]).unwrap();
        assert_eq!(set.matching("GOVERNANCE.md"), Some("governance.md"));
        assert_eq!(set.matching("Project-Governance.rst"), Some("*governance*"));
        assert_eq!(set.matching("README.md"), None);
    }

    #[test]
    fn default_patterns_cover_the_common_names() {
        let set = PatternSet::parse(crate::config::DEFAULT_PATTERNS).unwrap();
        for name in ["GOVERNANCE.md", "governance.rst", "Governance.txt", "GOVERNANCE", "project-governance.md", "governance_policy.adoc"] {
            assert!(set.matching(name).is_some(), "{name}");
        }
        for name in ["CONTRIBUTING.md", "governance.py", "governance.md.bak"] {
            assert!(set.matching(name).is_none(), "{name}");
        }
    }

    #[test]
    fn directory_patterns_are_rejected() {
        assert!(PatternSet::from_globs(["docs/governance.md"]).is_err());
        assert!(PatternSet::parse("# only comments\n").is_err());
    }
}
