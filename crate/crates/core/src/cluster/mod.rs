//! Rendering, embedding, clustering and labeling of statements, one job per
//! repository and feature with both snapshots fitted together.

mod agglomerative;
mod embed;
mod label;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::FeatureDistribution;
use crate::statement::{DeonticType, InstitutionalStatement, Polarity, Snapshot};

pub use agglomerative::{cluster, ClusterParams, DEFAULT_THETA};
pub use embed::{cosine, embed_imported, embed_lexical, terms, EmbeddingSource, StatementVector};
pub use label::{label_clusters, ClusterLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("clustering job has no statements")]
    EmptyInput,
    #[error("statement {0} renders to text without terms")]
    ZeroVector(String),
    #[error("no imported vector for statements: {}", .0.join(", "))]
    MissingVectors(Vec<String>),
    #[error("vector for {statement_id} has dimension {found}, expected {expected}")]
    DimensionMismatch { statement_id: String, expected: usize, found: usize },
    #[error("vectors in one job come from different sources")]
    MixedSources,
    #[error("statement id {0} appears twice in one job")]
    DuplicateId(String),
}

/// Statement component clustered as a feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeatureKind {
    Role,
    Action,
    Deontic,
    Object,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 4] = [FeatureKind::Role, FeatureKind::Action, FeatureKind::Deontic, FeatureKind::Object];

    /// Features that go through embedding and clustering.
    pub const CLUSTERED: [FeatureKind; 3] = [FeatureKind::Role, FeatureKind::Action, FeatureKind::Object];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Role => "ROLE",
            FeatureKind::Action => "ACTION",
            FeatureKind::Deontic => "DEONTIC",
            FeatureKind::Object => "OBJECT",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A feature as reported: the deontic feature appears twice, once over
/// canonical types and once under the binary polarity recode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MetricFeature {
    Role,
    Action,
    Deontic,
    DeonticPolarity,
    Object,
}

impl MetricFeature {
    pub const ALL: [MetricFeature; 5] = [
        MetricFeature::Role,
        MetricFeature::Action,
        MetricFeature::Deontic,
        MetricFeature::DeonticPolarity,
        MetricFeature::Object,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricFeature::Role => "ROLE",
            MetricFeature::Action => "ACTION",
            MetricFeature::Deontic => "DEONTIC",
            MetricFeature::DeonticPolarity => "DEONTIC_POLARITY",
            MetricFeature::Object => "OBJECT",
        }
    }

    /// Row label in report tables.
    pub fn table_label(self) -> &'static str {
        match self {
            MetricFeature::Role => "Roles",
            MetricFeature::Action => "Actions",
            MetricFeature::Deontic => "Deontic",
            MetricFeature::DeonticPolarity => "Deontic\u{2020}",
            MetricFeature::Object => "Objects",
        }
    }

    pub fn kind(self) -> FeatureKind {
        match self {
            MetricFeature::Role => FeatureKind::Role,
            MetricFeature::Action => FeatureKind::Action,
            MetricFeature::Deontic | MetricFeature::DeonticPolarity => FeatureKind::Deontic,
            MetricFeature::Object => FeatureKind::Object,
        }
    }
}

impl fmt::Display for MetricFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<FeatureKind> for MetricFeature {
    fn from(kind: FeatureKind) -> Self {
        match kind {
            FeatureKind::Role => MetricFeature::Role,
            FeatureKind::Action => MetricFeature::Action,
            FeatureKind::Deontic => MetricFeature::Deontic,
            FeatureKind::Object => MetricFeature::Object,
        }
    }
}

/// Cluster number, or the outlier marker (serialized as `-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "i64", try_from = "i64")]
pub enum ClusterId {
    Cluster(u32),
    Outlier,
}

impl From<ClusterId> for i64 {
    fn from(id: ClusterId) -> i64 {
        match id {
            ClusterId::Cluster(k) => i64::from(k),
            ClusterId::Outlier => -1,
        }
    }
}

impl TryFrom<i64> for ClusterId {
    type Error = String;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        match value {
            -1 => Ok(ClusterId::Outlier),
            v => u32::try_from(v).map(ClusterId::Cluster).map_err(|_| alloc::format!("invalid cluster id {v}")),
        }
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&i64::from(*self), f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub statement_id: String,
    pub feature: FeatureKind,
    pub cluster_id: ClusterId,
}

/// Short text standing for one feature of a statement; `None` when the
/// statement lacks that component or the feature is tallied directly.
pub fn render_statement(statement: &InstitutionalStatement, feature: FeatureKind) -> Option<String> {
    let rendered = match feature {
        FeatureKind::Role => Some(statement.role_canon.clone()),
        FeatureKind::Action => Some(match &statement.object_head {
            Some(object) => alloc::format!("{} {}", statement.action_lemma, object),
            None => statement.action_lemma.clone(),
        }),
        FeatureKind::Object => statement.object_head.clone(),
        FeatureKind::Deontic => None,
    };
    let rendered = rendered.filter(|text| !text.trim().is_empty());
    if rendered.is_none() && feature != FeatureKind::Deontic {
        log::debug!("statement {} has no {} component", statement.source.statement_id, feature);
    }
    rendered
}

/// Counts of one snapshot's statements over the clusters of a joint job.
///
/// The support is every non-outlier cluster of the job, so the initial and
/// latest distributions of one job are aligned. Outliers are left out.
pub fn feature_distribution(
    repo_id: &str,
    feature: FeatureKind,
    assignments: &[ClusterAssignment],
    snapshot_of: impl Fn(&str) -> Option<Snapshot>,
    snapshot: Snapshot,
) -> FeatureDistribution {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut outliers = 0usize;
    for a in assignments {
        if let ClusterId::Cluster(k) = a.cluster_id {
            let entry = counts.entry(k).or_insert(0);
            if snapshot_of(&a.statement_id) == Some(snapshot) {
                *entry += 1;
            }
        } else if snapshot_of(&a.statement_id) == Some(snapshot) {
            outliers += 1;
        }
    }
    if outliers > 0 {
        log::info!("{repo_id} {feature} {snapshot}: {outliers} outlier statements left out of the distribution");
    }
    let (support, counts): (Vec<String>, Vec<u64>) = counts.into_iter().map(|(k, c)| (k.to_string(), c)).unzip();
    FeatureDistribution::from_counts(repo_id, feature.into(), snapshot, support, counts)
}

/// Tally of deontic types (or their polarity) over a fixed inventory.
/// Statements without a modal are left out.
pub fn deontic_distribution(
    repo_id: &str,
    statements: &[(Snapshot, DeonticType, Polarity)],
    snapshot: Snapshot,
    polarity: bool,
) -> FeatureDistribution {
    let (feature, support): (MetricFeature, Vec<String>) = if polarity {
        (MetricFeature::DeonticPolarity, [Polarity::Enabling, Polarity::Restricting].iter().map(|p| p.name().to_string()).collect())
    } else {
        (
            MetricFeature::Deontic,
            DeonticType::ALL.iter().filter(|d| **d != DeonticType::None).map(|d| d.name().to_string()).collect(),
        )
    };
    let mut counts = alloc::vec![0u64; support.len()];
    for (snap, kind, pol) in statements {
        if *snap != snapshot || *kind == DeonticType::None {
            continue;
        }
        let name = if polarity { pol.name() } else { kind.name() };
        if let Some(i) = support.iter().position(|s| s == name) {
            counts[i] += 1;
        }
    }
    FeatureDistribution::from_counts(repo_id, feature, snapshot, support, counts)
}
