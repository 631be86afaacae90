//! Aggregation over repositories and emission of tables and exports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use govtrace_core::cluster::{ClusterId, FeatureKind, MetricFeature};
use govtrace_core::metrics::{bootstrap_replicate, ci_from_replicates, BootstrapCI, FeatureDistribution, PairedMetrics};
use govtrace_core::statement::Snapshot;

use crate::artifacts;
use crate::config::{Run, Subset};
use crate::error::{Error, Result, Stage};
use crate::mine::PairRecord;
use crate::pipeline::{selected_repos, LabelRecord};

/// Statistics aggregated with a bootstrap interval.
pub const STATISTICS: [&str; 4] = ["delta_h", "jsd", "delta_k", "rarefied_delta_k"];

/// One line of `aggregates.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub feature: MetricFeature,
    pub statistic: String,
    pub n: usize,
    pub mean: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub excludes_zero: bool,
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
}

/// True when the interval lies entirely on one side of zero.
pub fn excludes_zero(lo: f64, hi: f64) -> bool {
    lo > 0.0 || hi < 0.0
}

fn statistic(row: &PairedMetrics, name: &str) -> Option<f64> {
    match name {
        "delta_h" if row.eligible_h_jsd => row.delta_h,
        "jsd" if row.eligible_h_jsd => row.jsd,
        "delta_k" if row.eligible_k => Some(row.delta_k as f64),
        "rarefied_delta_k" if row.eligible_k => row.rarefied_delta_k,
        "h_initial" if row.eligible_h_jsd => row.h_initial,
        "h_latest" if row.eligible_h_jsd => row.h_latest,
        "k_initial" if row.eligible_k => Some(row.k_initial as f64),
        "k_latest" if row.eligible_k => Some(row.k_latest as f64),
        _ => None,
    }
}

fn values(rows: &[PairedMetrics], feature: MetricFeature, name: &str) -> Vec<f64> {
    rows.iter().filter(|r| r.feature == feature).filter_map(|r| statistic(r, name)).collect()
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Equal-weight bootstrap interval with replicates computed in parallel;
/// each replicate has its own seed, so the result does not depend on
/// scheduling.
pub fn parallel_bootstrap(values: &[f64], config: &govtrace_core::metrics::BootstrapConfig) -> Option<BootstrapCI> {
    if values.is_empty() {
        return None;
    }
    let replicates: Vec<f64> =
        (0..config.b as u64).into_par_iter().map(|r| bootstrap_replicate(values, config.seed, r)).collect();
    ci_from_replicates(values, replicates, config).ok()
}

pub fn aggregate(run: &Run, rows: &[PairedMetrics]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for feature in MetricFeature::ALL {
        for name in STATISTICS {
            let vals = values(rows, feature, name);
            let config = run.config.bootstrap_config(feature.as_str(), name);
            let ci = parallel_bootstrap(&vals, &config);
            out.push(AggregateRow {
                feature,
                statistic: name.to_string(),
                n: vals.len(),
                mean: ci.map(|c| c.mean),
                lo: ci.map(|c| c.lo),
                hi: ci.map(|c| c.hi),
                excludes_zero: ci.is_some_and(|c| excludes_zero(c.lo, c.hi)),
                b: config.b,
                alpha: config.alpha,
                seed: config.seed,
            });
        }
    }
    out
}

fn fixed(value: f64) -> String {
    let s = format!("{value:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn signed(value: f64) -> String {
    let s = fixed(value);
    if s.starts_with('-') {
        s
    } else {
        format!("+{s}")
    }
}

/// A table cell group for one interval: mean, bounds and the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct CiCells {
    pub mean: String,
    pub lo: String,
    pub hi: String,
    pub excludes_zero: bool,
}

impl CiCells {
    fn from_row(row: Option<&AggregateRow>) -> Option<Self> {
        let row = row?;
        Some(CiCells {
            mean: signed(row.mean?),
            lo: fixed(row.lo?),
            hi: fixed(row.hi?),
            excludes_zero: row.excludes_zero,
        })
    }

    /// `+0.484 [0.258, 0.713] *`, the star marking an interval that excludes 0.
    pub fn display(cells: &Option<CiCells>) -> String {
        match cells {
            Some(c) => format!("{} [{}, {}]{}", c.mean, c.lo, c.hi, if c.excludes_zero { " *" } else { "" }),
            None => "n/a".into(),
        }
    }

    fn csv(cells: &Option<CiCells>) -> [String; 4] {
        match cells {
            Some(c) => [c.mean.clone(), c.lo.clone(), c.hi.clone(), c.excludes_zero.to_string()],
            None => [String::new(), String::new(), String::new(), "false".into()],
        }
    }
}

/// One row of either table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub feature: MetricFeature,
    pub n: usize,
    pub initial: Option<String>,
    pub latest: Option<String>,
    pub first: Option<CiCells>,
    pub second: Option<CiCells>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    /// Names of the level and the two interval columns.
    pub level: &'static str,
    pub first: &'static str,
    pub second: &'static str,
    pub rows: Vec<TableRow>,
}

fn build_table(
    rows: &[PairedMetrics],
    aggregates: &[AggregateRow],
    level: (&'static str, &str, &str),
    stats: (&'static str, &'static str, &str, &str),
    title: String,
) -> Table {
    let find = |feature: MetricFeature, name: &str| aggregates.iter().find(|a| a.feature == feature && a.statistic == name);
    let table_rows = MetricFeature::ALL
        .into_iter()
        .map(|feature| TableRow {
            feature,
            n: find(feature, stats.2).map_or(0, |a| a.n),
            initial: mean(&values(rows, feature, level.1)).map(fixed),
            latest: mean(&values(rows, feature, level.2)).map(fixed),
            first: CiCells::from_row(find(feature, stats.2)),
            second: CiCells::from_row(find(feature, stats.3)),
        })
        .collect();
    Table { title, level: level.0, first: stats.0, second: stats.1, rows: table_rows }
}

pub fn entropy_table(run: &Run, rows: &[PairedMetrics], aggregates: &[AggregateRow]) -> Table {
    build_table(
        rows,
        aggregates,
        ("H", "h_initial", "h_latest"),
        ("\u{394}H", "JSD", "delta_h", "jsd"),
        format!("Entropy (bits) and divergence, mean [{} CI]", level_label(run)),
    )
}

pub fn counts_table(run: &Run, rows: &[PairedMetrics], aggregates: &[AggregateRow]) -> Table {
    build_table(
        rows,
        aggregates,
        ("K", "k_initial", "k_latest"),
        ("\u{394}K", "Rarefied \u{394}K", "delta_k", "rarefied_delta_k"),
        format!("Richness (clusters with >= {} statements), mean [{} CI]", run.config.rarefaction.tau, level_label(run)),
    )
}

fn level_label(run: &Run) -> String {
    let pct = (1.0 - run.config.bootstrap.alpha) * 100.0;
    let pct = if (pct - pct.round()).abs() < 1e-9 { format!("{pct:.0}") } else { format!("{pct}") };
    format!("{pct}%")
}

impl Table {
    fn headers(&self) -> [String; 6] {
        [
            "Feature".into(),
            "n".into(),
            format!("Initial {}", self.level),
            format!("Latest {}", self.level),
            self.first.to_string(),
            self.second.to_string(),
        ]
    }

    /// Aligned plain-text rendering with 3 decimals.
    pub fn render(&self, header: &str) -> String {
        let headers = self.headers();
        let cells: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.feature.table_label().to_string(),
                    r.n.to_string(),
                    r.initial.clone().unwrap_or_else(|| "n/a".into()),
                    r.latest.clone().unwrap_or_else(|| "n/a".into()),
                    CiCells::display(&r.first),
                    CiCells::display(&r.second),
                ]
            })
            .collect();
        let width = |i: usize| {
            cells.iter().map(|c| c[i].chars().count()).chain([headers[i].chars().count()]).max().unwrap_or(0)
        };
        let widths: Vec<usize> = (0..6).map(width).collect();
        let line = |row: &[String; 6]| {
            let mut s = String::new();
            for (i, cell) in row.iter().enumerate() {
                let pad = widths[i] - cell.chars().count();
                if i == 0 {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str("  ");
                    s.push_str(&" ".repeat(pad));
                    s.push_str(cell);
                }
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "# {header}");
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", line(&headers));
        let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * 5));
        for row in &cells {
            let _ = writeln!(out, "{}", line(row));
        }
        let _ = writeln!(out, "* interval excludes 0. \u{2020} deontics recoded as enabling vs. restricting.");
        out
    }

    /// CSV records carrying exactly the strings shown in the text table.
    pub fn csv_records(&self) -> Vec<Vec<String>> {
        let key = |name: &str| name.to_lowercase().replace('\u{394}', "delta_").replace(' ', "_");
        let (first, second) = (key(self.first), key(self.second));
        let mut header = vec![
            "feature".to_string(),
            "n".into(),
            format!("initial_{}", self.level.to_lowercase()),
            format!("latest_{}", self.level.to_lowercase()),
        ];
        for name in [&first, &second] {
            header.extend([name.clone(), format!("{name}_lo"), format!("{name}_hi"), format!("{name}_excludes_zero")]);
        }
        let mut records = vec![header];
        for r in &self.rows {
            let mut record = vec![
                r.feature.table_label().to_string(),
                r.n.to_string(),
                r.initial.clone().unwrap_or_default(),
                r.latest.clone().unwrap_or_default(),
            ];
            record.extend(CiCells::csv(&r.first));
            record.extend(CiCells::csv(&r.second));
            records.push(record);
        }
        records
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionRow {
    pub repo_id: String,
    pub feature: MetricFeature,
    pub cluster: String,
    pub label: String,
    pub count: u64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichnessRow {
    pub feature: MetricFeature,
    pub snapshot: Snapshot,
    pub repo_id: String,
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionRow {
    pub repo_id: String,
    /// Empty for exclusions that apply to the whole repository.
    pub feature: String,
    pub reason: String,
}

/// Latest-snapshot composition of K-eligible repository features.
pub fn composition_rows(
    rows: &[PairedMetrics],
    distributions: &[FeatureDistribution],
    labels: &[LabelRecord],
) -> Vec<CompositionRow> {
    let label_of: BTreeMap<(&str, FeatureKind, ClusterId), String> = labels
        .iter()
        .map(|l| ((l.repo_id.as_str(), l.feature, l.cluster_id), l.top_terms.join(" ")))
        .collect();
    let mut out = Vec::new();
    for row in rows.iter().filter(|r| r.eligible_k) {
        let Some(dist) = distributions
            .iter()
            .find(|d| d.repo_id == row.repo_id && d.feature == row.feature && d.snapshot == Snapshot::Latest)
        else {
            continue;
        };
        for ((cluster, &count), &share) in dist.support.iter().zip(&dist.counts).zip(&dist.probs) {
            if count == 0 {
                continue;
            }
            let label = match row.feature {
                MetricFeature::Deontic | MetricFeature::DeonticPolarity => cluster.clone(),
                _ => cluster
                    .parse::<u32>()
                    .ok()
                    .and_then(|k| label_of.get(&(row.repo_id.as_str(), row.feature.kind(), ClusterId::Cluster(k))))
                    .cloned()
                    .unwrap_or_else(|| cluster.clone()),
            };
            out.push(CompositionRow {
                repo_id: row.repo_id.clone(),
                feature: row.feature,
                cluster: cluster.clone(),
                label,
                count,
                share,
            });
        }
    }
    out
}

pub fn richness_rows(rows: &[PairedMetrics]) -> Vec<RichnessRow> {
    let mut out = Vec::new();
    for feature in MetricFeature::ALL {
        for snapshot in Snapshot::BOTH {
            for row in rows.iter().filter(|r| r.feature == feature && r.eligible_k) {
                let k = if snapshot == Snapshot::Initial { row.k_initial } else { row.k_latest };
                out.push(RichnessRow { feature, snapshot, repo_id: row.repo_id.clone(), k });
            }
        }
    }
    out
}

pub fn exclusion_rows(pairs: &[PairRecord], subset: Subset, rows: &[PairedMetrics]) -> Vec<ExclusionRow> {
    let selected: Vec<&str> = selected_repos(pairs, subset).iter().map(|p| p.repo_id.as_str()).collect();
    let mut out = Vec::new();
    for pair in pairs {
        let reason = match pair.exclusion {
            Some(reason) => Some(reason.as_str()),
            None if !selected.contains(&pair.repo_id.as_str()) => Some("within-day"),
            None => None,
        };
        if let Some(reason) = reason {
            out.push(ExclusionRow { repo_id: pair.repo_id.clone(), feature: String::new(), reason: reason.into() });
        }
    }
    for row in rows {
        if !row.eligible_k {
            out.push(ExclusionRow { repo_id: row.repo_id.clone(), feature: row.feature.as_str().into(), reason: "ineligible-k".into() });
        }
        if !row.eligible_h_jsd {
            out.push(ExclusionRow {
                repo_id: row.repo_id.clone(),
                feature: row.feature.as_str().into(),
                reason: "ineligible-h-jsd".into(),
            });
        }
    }
    out
}

/// Aggregates the metrics file and writes every table and export.
pub fn report(run: &Run, out: &Path, stage_input: Option<&Path>) -> Result<()> {
    let metrics_path = stage_input.map(Path::to_path_buf).unwrap_or_else(|| out.join(artifacts::METRICS));
    let rows: Vec<PairedMetrics> = artifacts::read_csv(Stage::Report, &metrics_path)?;
    let beside = metrics_path.parent().unwrap_or(out);
    let distributions: Vec<FeatureDistribution> = artifacts::read_jsonl(Stage::Report, &beside.join(artifacts::DISTRIBUTIONS))?;
    let labels_path = out.join(artifacts::CLUSTER_LABELS);
    let labels: Vec<LabelRecord> =
        if labels_path.exists() { artifacts::read_jsonl(Stage::Report, &labels_path)? } else { Vec::new() };
    let pairs: Vec<PairRecord> = artifacts::read_jsonl(Stage::Report, &out.join(artifacts::PAIRS))?;
    if rows.is_empty() {
        log::warn!("no repositories in the analysed subset; tables will be empty");
    }

    let header = run.header();
    let aggregates = aggregate(run, &rows);
    artifacts::write_csv(Stage::Report, &out.join(artifacts::AGGREGATES), &header, &aggregates)?;
    for (table, txt, csv) in [
        (entropy_table(run, &rows, &aggregates), artifacts::TABLE_ENTROPY_TXT, artifacts::TABLE_ENTROPY_CSV),
        (counts_table(run, &rows, &aggregates), artifacts::TABLE_COUNTS_TXT, artifacts::TABLE_COUNTS_CSV),
    ] {
        artifacts::write_text(Stage::Report, &out.join(txt), &table.render(&header))?;
        artifacts::write_csv_records(Stage::Report, &out.join(csv), &header, &table.csv_records())?;
    }
    artifacts::write_csv(Stage::Report, &out.join(artifacts::COMPOSITION), &header, composition_rows(&rows, &distributions, &labels))?;
    artifacts::write_csv(Stage::Report, &out.join(artifacts::RICHNESS), &header, richness_rows(&rows))?;
    artifacts::write_csv(Stage::Report, &out.join(artifacts::EXCLUSIONS), &header, exclusion_rows(&pairs, run.config.subset, &rows))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestResource {
    pub name: String,
    pub origin: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRepo {
    pub repo_id: String,
    pub path: String,
    pub head: Option<String>,
}

/// Everything needed to re-execute a run. The only file in the output
/// directory that carries wall-clock timestamps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    pub stages: Vec<String>,
    pub seed: u64,
    pub header: String,
    pub config_hash: String,
    pub config: crate::config::RunConfig,
    pub resources: Vec<ManifestResource>,
    pub repos: Vec<ManifestRepo>,
    pub outputs: Vec<ManifestFile>,
}

pub fn write_manifest(run: &Run, out: &Path, stages: &[Stage], started_at: chrono::DateTime<chrono::Utc>) -> Result<()> {
    let files = artifacts::list_files(out).map_err(|e| Error::io(Stage::Report, out, e))?;
    let mut outputs = Vec::new();
    for path in files.into_iter().filter(|p| p != artifacts::MANIFEST) {
        let sha256 = artifacts::sha256_file(&out.join(&path)).map_err(|e| Error::io(Stage::Report, &out.join(&path), e))?;
        outputs.push(ManifestFile { path, sha256 });
    }
    let repos = run
        .repos
        .iter()
        .map(|r| ManifestRepo {
            repo_id: r.repo_id.clone(),
            path: r.path.display().to_string(),
            head: crate::git::GitRepo::open(&r.repo_id, &r.path).ok().and_then(|g| g.head().ok().flatten()),
        })
        .collect();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        started_at: started_at.to_rfc3339(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        stages: stages.iter().map(|s| s.as_str().to_string()).collect(),
        seed: run.config.seed,
        header: run.header(),
        config_hash: run.config_hash(),
        config: run.config.clone(),
        resources: run
            .resources
            .files
            .iter()
            .map(|f| ManifestResource { name: f.name.into(), origin: f.origin.clone(), sha256: f.sha256() })
            .collect(),
        repos,
        outputs,
    };
    artifacts::write_json(Stage::Report, &out.join(artifacts::MANIFEST), &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_examples() {
        assert!(excludes_zero(0.258, 0.713));
        assert!(!excludes_zero(-0.038, 0.055));
        assert!(!excludes_zero(0.0, 0.0));
        assert!(excludes_zero(-0.5, -0.1));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(signed(0.4839), "+0.484");
        assert_eq!(signed(-0.0001), "+0.000");
        assert_eq!(signed(-0.038), "-0.038");
        assert_eq!(fixed(0.7126), "0.713");
        let cells = Some(CiCells { mean: "+0.484".into(), lo: "0.258".into(), hi: "0.713".into(), excludes_zero: true });
        assert_eq!(CiCells::display(&cells), "+0.484 [0.258, 0.713] *");
        assert_eq!(CiCells::display(&None), "n/a");
    }

    fn metrics_row(repo: &str, k: (u64, u64)) -> PairedMetrics {
        PairedMetrics {
            repo_id: repo.into(),
            feature: MetricFeature::Role,
            n_initial: 4,
            n_latest: 4,
            h_initial: Some(1.0),
            h_latest: Some(1.5),
            delta_h: Some(0.5),
            jsd: Some(0.2),
            k_initial: k.0,
            k_latest: k.1,
            delta_k: k.1 as i64 - k.0 as i64,
            rarefied_delta_k: Some(0.5),
            eligible_h_jsd: false,
            eligible_k: true,
        }
    }

    #[test]
    fn composition_shares_sum_to_one() {
        let row = metrics_row("r", (1, 2));
        let dist = FeatureDistribution::from_counts(
            "r",
            MetricFeature::Role,
            Snapshot::Latest,
            vec!["0".into(), "1".into(), "2".into(), "3".into()],
            vec![2, 1, 1, 0],
        );
        let labels = vec![LabelRecord {
            repo_id: "r".into(),
            feature: FeatureKind::Role,
            cluster_id: ClusterId::Cluster(0),
            top_terms: vec!["maintainer".into()],
            scores: vec![1.0],
        }];
        let out = composition_rows(&[row], &[dist], &labels);
        assert_eq!(out.len(), 3);
        assert_eq!(out.iter().map(|r| r.share).sum::<f64>(), 1.0);
        assert_eq!(out[0].label, "maintainer");
        assert_eq!(out[1].label, "1");
    }

    #[test]
    fn ineligible_rows_leave_richness_export() {
        let mut row = metrics_row("r", (1, 2));
        row.eligible_k = false;
        assert!(richness_rows(&[row.clone()]).is_empty());
        let pairs = Vec::new();
        let exclusions = exclusion_rows(&pairs, Subset::All, &[row]);
        assert!(exclusions.iter().any(|e| e.repo_id == "r" && e.reason == "ineligible-k"));
        assert_eq!(richness_rows(&[metrics_row("r", (1, 2))]).len(), 2);
    }
}
