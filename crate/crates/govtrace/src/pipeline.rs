//! The normalize, parse, cluster and metrics stages. Each reads the previous
//! stage's artifact from the output directory (or a replacement given with
//! `--stage-input`) and writes its own.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use govtrace_core::cluster::{
    cluster, deontic_distribution, embed_imported, embed_lexical, feature_distribution, label_clusters, render_statement,
    ClusterAssignment, ClusterId, FeatureKind, MetricFeature,
};
use govtrace_core::metrics::{paired_metrics, FeatureDistribution, PairedMetrics};
use govtrace_core::statement::{recode_polarity, DeonticType, InstitutionalStatement, Polarity, Snapshot, StatementSource};
use govtrace_core::text::{resolve_pronouns, segment, NormalizedDocument, SentenceSpan, Substitution};

use crate::artifacts::{self, normalized_path};
use crate::config::{Run, Subset};
use crate::error::{Error, Result, Stage};
use crate::mine::{mine_corpus, PairRecord};

pub fn mine(run: &Run, out: &Path) -> Result<()> {
    let mining = mine_corpus(&run.repos, &run.resources.patterns, &run.resources.normalizer).map_err(|errors| {
        let repos = errors.iter().map(|e| e.repo().to_string()).collect();
        let detail = errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        Error::stage_repos(Stage::Mine, repos, detail)
    })?;
    for record in &mining.records {
        match (&record.exclusion, record.gap_days) {
            (Some(reason), _) => log::info!("{}: excluded ({reason})", record.repo_id),
            (None, Some(gap)) => log::info!("{}: paired, gap {gap} days", record.repo_id),
            _ => {}
        }
    }
    artifacts::write_jsonl(Stage::Mine, &out.join(artifacts::PAIRS), &mining.records)?;
    artifacts::write_json(Stage::Mine, &out.join(artifacts::CORPUS_STATS), &mining.stats)
}

/// Normalized form of one snapshot, stored as
/// `normalized/{repo}/{commit}.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedRecord {
    pub repo_id: String,
    pub commit_id: String,
    pub snapshot: Snapshot,
    pub section_count: usize,
    pub document: NormalizedDocument,
    pub sentences: Vec<SentenceSpan>,
    /// Pronoun substitutions; reverting them restores the normalized text.
    pub substitutions: Vec<Substitution>,
}

impl NormalizedRecord {
    pub fn sentence(&self, idx: usize) -> &str {
        self.sentences[idx].text(&self.document)
    }
}

pub fn normalize_snapshot(run: &Run, repo_id: &str, commit_id: &str, snapshot: Snapshot, raw: &str) -> NormalizedRecord {
    let normalizer = &run.resources.normalizer;
    let document = normalizer.normalize(raw);
    let sentences = segment(&document, normalizer.abbreviations());
    let section_count = govtrace_core::text::count_sections(&document);
    let (document, sentences, substitutions) = if run.config.resolve_pronouns {
        let resolution = resolve_pronouns(&document, &sentences, run.resources.extractor.lexicon());
        (resolution.document, resolution.sentences, resolution.log)
    } else {
        (document, sentences, Vec::new())
    };
    NormalizedRecord {
        repo_id: repo_id.to_string(),
        commit_id: commit_id.to_string(),
        snapshot,
        section_count,
        document,
        sentences,
        substitutions,
    }
}

fn read_pairs(out: &Path, stage: Stage, stage_input: Option<&Path>) -> Result<Vec<PairRecord>> {
    let path = stage_input.map(Path::to_path_buf).unwrap_or_else(|| out.join(artifacts::PAIRS));
    artifacts::read_jsonl(stage, &path)
}

fn snapshots(record: &PairRecord) -> Vec<(Snapshot, &govtrace_core::corpus::GovernanceSnapshot)> {
    match (&record.initial, &record.latest) {
        (Some(initial), Some(latest)) => vec![(Snapshot::Initial, initial), (Snapshot::Latest, latest)],
        _ => Vec::new(),
    }
}

pub fn normalize(run: &Run, out: &Path, stage_input: Option<&Path>) -> Result<()> {
    let pairs = read_pairs(out, Stage::Normalize, stage_input)?;
    let dir = out.join(artifacts::NORMALIZED_DIR);
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|e| Error::io(Stage::Normalize, &dir, e))?;
    }
    let jobs: Vec<(&PairRecord, Snapshot, &govtrace_core::corpus::GovernanceSnapshot)> =
        pairs.iter().flat_map(|p| snapshots(p).into_iter().map(move |(s, snap)| (p, s, snap))).collect();
    let failures: Vec<(String, Error)> = jobs
        .par_iter()
        .filter_map(|(pair, snapshot, snap)| {
            let record = normalize_snapshot(run, &pair.repo_id, &snap.commit_id, *snapshot, &snap.raw_text);
            let path = normalized_path(out, &pair.repo_id, &snap.commit_id);
            artifacts::write_json(Stage::Normalize, &path, &record).err().map(|e| (pair.repo_id.clone(), e))
        })
        .collect();
    fail_with(Stage::Normalize, failures)
}

fn fail_with(stage: Stage, failures: Vec<(String, Error)>) -> Result<()> {
    if failures.is_empty() {
        return Ok(());
    }
    let repos: BTreeSet<String> = failures.iter().map(|(r, _)| r.clone()).collect();
    let detail = failures.iter().map(|(_, e)| e.to_string()).collect::<Vec<_>>().join("; ");
    Err(Error::stage_repos(stage, repos.into_iter().collect(), detail))
}

pub fn extract_snapshot(run: &Run, record: &NormalizedRecord) -> Vec<InstitutionalStatement> {
    let mut statements = Vec::new();
    for idx in 0..record.sentences.len() {
        let source = StatementSource {
            statement_id: String::new(),
            repo_id: record.repo_id.clone(),
            snapshot: record.snapshot,
            sentence_index: idx,
        };
        statements.extend(run.resources.extractor.extract_at(record.sentence(idx), &source));
    }
    statements
}

/// Extracts statements from every normalized snapshot, or, given a
/// statements file from an external parser, validates and adopts it.
pub fn parse(run: &Run, out: &Path, stage_input: Option<&Path>) -> Result<()> {
    let target = out.join(artifacts::STATEMENTS);
    if let Some(import) = stage_input {
        let statements: Vec<InstitutionalStatement> = artifacts::read_jsonl(Stage::Parse, import)?;
        validate_statements(&statements)?;
        return artifacts::write_jsonl(Stage::Parse, &target, &statements);
    }
    let pairs = read_pairs(out, Stage::Parse, None)?;
    let per_repo: Vec<std::result::Result<Vec<InstitutionalStatement>, (String, Error)>> = pairs
        .par_iter()
        .map(|pair| {
            let mut statements = Vec::new();
            for (_, snap) in snapshots(pair) {
                let path = normalized_path(out, &pair.repo_id, &snap.commit_id);
                let record: NormalizedRecord =
                    artifacts::read_json(Stage::Parse, &path).map_err(|e| (pair.repo_id.clone(), e))?;
                statements.extend(extract_snapshot(run, &record));
            }
            Ok(statements)
        })
        .collect();
    let mut statements = Vec::new();
    let mut failures = Vec::new();
    for result in per_repo {
        match result {
            Ok(s) => statements.extend(s),
            Err(f) => failures.push(f),
        }
    }
    fail_with(Stage::Parse, failures)?;
    artifacts::write_jsonl(Stage::Parse, &target, &statements)
}

fn validate_statements(statements: &[InstitutionalStatement]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for s in statements {
        let id = &s.source.statement_id;
        let problem = if id.is_empty() {
            Some("empty statement_id")
        } else if !seen.insert(id.as_str()) {
            Some("duplicate statement_id")
        } else if s.action_lemma.trim().is_empty() {
            Some("empty action_lemma")
        } else if s.source.repo_id.is_empty() {
            Some("empty repo_id")
        } else {
            None
        };
        if let Some(problem) = problem {
            return Err(Error::stage_repos(Stage::Parse, vec![s.source.repo_id.clone()], format!("{problem} ({id:?})")));
        }
        if !s.spans_consistent() {
            log::warn!("imported statement {id}: spans do not reproduce the component texts");
        }
    }
    Ok(())
}

/// One line of `cluster_labels.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub repo_id: String,
    pub feature: FeatureKind,
    pub cluster_id: ClusterId,
    pub top_terms: Vec<String>,
    pub scores: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct VectorRecord {
    statement_id: String,
    vector: Vec<f64>,
}

fn read_statements(out: &Path, stage: Stage) -> Result<Vec<InstitutionalStatement>> {
    artifacts::read_jsonl(stage, &out.join(artifacts::STATEMENTS))
}

fn by_repo(statements: &[InstitutionalStatement]) -> BTreeMap<&str, Vec<&InstitutionalStatement>> {
    let mut map: BTreeMap<&str, Vec<&InstitutionalStatement>> = BTreeMap::new();
    for s in statements {
        map.entry(s.source.repo_id.as_str()).or_default().push(s);
    }
    map
}

type JobOutput = (Vec<ClusterAssignment>, Vec<LabelRecord>);

fn cluster_job(
    run: &Run,
    repo_id: &str,
    feature: FeatureKind,
    statements: &[&InstitutionalStatement],
    sidecar: Option<&BTreeMap<String, Vec<f64>>>,
) -> std::result::Result<JobOutput, String> {
    let items: Vec<(String, String)> = statements
        .iter()
        .filter_map(|s| render_statement(s, feature).map(|text| (s.source.statement_id.clone(), text)))
        .collect();
    if items.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let vectors = match sidecar {
        Some(sidecar) => {
            let ids: Vec<String> = items.iter().map(|(id, _)| id.clone()).collect();
            embed_imported(&ids, sidecar)
        }
        None => embed_lexical(&items),
    }
    .map_err(|e| e.to_string())?;
    let assignments = cluster(&vectors, feature, run.config.cluster_params()).map_err(|e| e.to_string())?;
    let texts: BTreeMap<String, String> = items.into_iter().collect();
    let labels = label_clusters(&assignments, &texts)
        .into_iter()
        .map(|l| LabelRecord {
            repo_id: repo_id.to_string(),
            feature,
            cluster_id: l.cluster_id,
            top_terms: l.top_terms,
            scores: l.scores,
        })
        .collect();
    Ok((assignments, labels))
}

/// Clusters each repository's statements, per feature, over both snapshots
/// jointly.
pub fn cluster_stage(run: &Run, out: &Path, stage_input: Option<&Path>) -> Result<()> {
    let statements: Vec<InstitutionalStatement> = match stage_input {
        Some(path) => artifacts::read_jsonl(Stage::Cluster, path)?,
        None => read_statements(out, Stage::Cluster)?,
    };
    let sidecar: Option<BTreeMap<String, Vec<f64>>> = match &run.config.vectors {
        Some(path) => Some(
            artifacts::read_jsonl::<VectorRecord>(Stage::Cluster, path)?
                .into_iter()
                .map(|r| (r.statement_id, r.vector))
                .collect(),
        ),
        None => None,
    };
    let grouped = by_repo(&statements);
    let jobs: Vec<(&str, FeatureKind)> =
        grouped.keys().flat_map(|repo| FeatureKind::CLUSTERED.into_iter().map(move |f| (*repo, f))).collect();
    let results: Vec<std::result::Result<JobOutput, (String, String)>> = jobs
        .par_iter()
        .map(|&(repo, feature)| {
            cluster_job(run, repo, feature, &grouped[repo], sidecar.as_ref())
                .map_err(|e| (repo.to_string(), format!("{repo} {feature}: {e}")))
        })
        .collect();
    let (mut assignments, mut labels, mut failures) = (Vec::new(), Vec::new(), Vec::new());
    for result in results {
        match result {
            Ok((a, l)) => {
                assignments.extend(a);
                labels.extend(l);
            }
            Err((repo, message)) => failures.push((repo, Error::stage(Stage::Cluster, message))),
        }
    }
    fail_with(Stage::Cluster, failures)?;
    artifacts::write_jsonl(Stage::Cluster, &out.join(artifacts::CLUSTERS), &assignments)?;
    artifacts::write_jsonl(Stage::Cluster, &out.join(artifacts::CLUSTER_LABELS), &labels)
}

/// Repositories analysed under the configured subset.
pub fn selected_repos(pairs: &[PairRecord], subset: Subset) -> Vec<&PairRecord> {
    pairs
        .iter()
        .filter(|p| p.exclusion.is_none() && (subset == Subset::All || p.across_day == Some(true)))
        .collect()
}

/// Distributions and rarefaction labels of one repository and feature.
struct FeatureData {
    initial: FeatureDistribution,
    latest: FeatureDistribution,
    labels: [Vec<(String, String)>; 2],
}

fn feature_data(
    run: &Run,
    repo_id: &str,
    feature: MetricFeature,
    statements: &[&InstitutionalStatement],
    assignments: &[&ClusterAssignment],
) -> FeatureData {
    let snapshot_of: BTreeMap<&str, Snapshot> =
        statements.iter().map(|s| (s.source.statement_id.as_str(), s.source.snapshot)).collect();
    let mut labels: [Vec<(String, String)>; 2] = [Vec::new(), Vec::new()];
    let slot = |s: Snapshot| if s == Snapshot::Initial { 0 } else { 1 };
    match feature {
        MetricFeature::Deontic | MetricFeature::DeonticPolarity => {
            let polarity = feature == MetricFeature::DeonticPolarity;
            let table = run.resources.extractor.polarity();
            let tally: Vec<(Snapshot, DeonticType, Polarity)> = statements
                .iter()
                .map(|s| (s.source.snapshot, s.deontic_canon, recode_polarity(s.deontic_canon, table)))
                .collect();
            for (s, (snapshot, kind, pol)) in statements.iter().zip(&tally) {
                if *kind == DeonticType::None || (polarity && *pol == Polarity::None) {
                    continue;
                }
                let label = if polarity { pol.name() } else { kind.name() };
                labels[slot(*snapshot)].push((s.source.statement_id.clone(), label.to_string()));
            }
            FeatureData {
                initial: deontic_distribution(repo_id, &tally, Snapshot::Initial, polarity),
                latest: deontic_distribution(repo_id, &tally, Snapshot::Latest, polarity),
                labels,
            }
        }
        _ => {
            let kind = feature.kind();
            let owned: Vec<ClusterAssignment> =
                assignments.iter().filter(|a| a.feature == kind).map(|a| (*a).clone()).collect();
            for a in &owned {
                if let (ClusterId::Cluster(k), Some(snapshot)) = (a.cluster_id, snapshot_of.get(a.statement_id.as_str())) {
                    labels[slot(*snapshot)].push((a.statement_id.clone(), k.to_string()));
                }
            }
            let lookup = |id: &str| snapshot_of.get(id).copied();
            FeatureData {
                initial: feature_distribution(repo_id, kind, &owned, lookup, Snapshot::Initial),
                latest: feature_distribution(repo_id, kind, &owned, lookup, Snapshot::Latest),
                labels,
            }
        }
    }
}

fn borrowed(pairs: &[(String, String)]) -> Vec<(&str, &str)> {
    pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn repo_metrics(
    run: &Run,
    repo_id: &str,
    statements: &[&InstitutionalStatement],
    assignments: &[&ClusterAssignment],
) -> std::result::Result<(Vec<PairedMetrics>, Vec<FeatureDistribution>), String> {
    let mut rows = Vec::new();
    let mut distributions = Vec::new();
    for feature in MetricFeature::ALL {
        let data = feature_data(run, repo_id, feature, statements, assignments);
        let metrics = paired_metrics(
            &data.initial,
            &data.latest,
            &borrowed(&data.labels[0]),
            &borrowed(&data.labels[1]),
            run.config.rarefaction.tau,
            &run.config.rarefaction_params(feature.as_str()),
        )
        .map_err(|e| format!("{repo_id} {feature}: {e}"))?;
        rows.push(metrics);
        distributions.push(data.initial);
        distributions.push(data.latest);
    }
    Ok((rows, distributions))
}

/// Paired metrics for every selected repository and feature.
pub fn metrics(run: &Run, out: &Path, stage_input: Option<&Path>) -> Result<()> {
    let pairs = read_pairs(out, Stage::Metrics, None)?;
    let statements = read_statements(out, Stage::Metrics)?;
    let clusters_path = stage_input.map(Path::to_path_buf).unwrap_or_else(|| out.join(artifacts::CLUSTERS));
    let assignments: Vec<ClusterAssignment> = artifacts::read_jsonl(Stage::Metrics, &clusters_path)?;

    let repo_of: BTreeMap<&str, &str> =
        statements.iter().map(|s| (s.source.statement_id.as_str(), s.source.repo_id.as_str())).collect();
    let mut assignments_by_repo: BTreeMap<&str, Vec<&ClusterAssignment>> = BTreeMap::new();
    let mut unknown = Vec::new();
    for a in &assignments {
        match repo_of.get(a.statement_id.as_str()) {
            Some(repo) => assignments_by_repo.entry(repo).or_default().push(a),
            None => unknown.push(a.statement_id.clone()),
        }
    }
    if !unknown.is_empty() {
        unknown.truncate(10);
        return Err(Error::stage(Stage::Metrics, format!("cluster assignments for unknown statements: {}", unknown.join(", "))));
    }
    let statements_by_repo = by_repo(&statements);
    let selected = selected_repos(&pairs, run.config.subset);
    let results: Vec<std::result::Result<(Vec<PairedMetrics>, Vec<FeatureDistribution>), (String, String)>> = selected
        .par_iter()
        .map(|pair| {
            let repo = pair.repo_id.as_str();
            let stmts = statements_by_repo.get(repo).map(Vec::as_slice).unwrap_or_default();
            let assigned = assignments_by_repo.get(repo).map(Vec::as_slice).unwrap_or_default();
            repo_metrics(run, repo, stmts, assigned).map_err(|e| (repo.to_string(), e))
        })
        .collect();
    let (mut rows, mut distributions, mut failures) = (Vec::new(), Vec::new(), Vec::new());
    for result in results {
        match result {
            Ok((r, d)) => {
                rows.extend(r);
                distributions.extend(d);
            }
            Err((repo, message)) => failures.push((repo, Error::stage(Stage::Metrics, message))),
        }
    }
    fail_with(Stage::Metrics, failures)?;
    artifacts::write_csv(Stage::Metrics, &out.join(artifacts::METRICS), &run.header(), &rows)?;
    artifacts::write_jsonl(Stage::Metrics, &out.join(artifacts::DISTRIBUTIONS), &distributions)
}
