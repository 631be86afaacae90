//! Institutional statements: who (role) may, must or must not (deontic) do
//! what (action) to what (object).

mod deontic;
mod extract;
mod role;
mod typology;

use alloc::string::String;
use core::fmt;
use core::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use deontic::{canonicalize_deontic, recode_polarity, DeonticMap, DeonticType, Polarity, PolarityTable};
pub use extract::Extractor;
pub use role::{normalize_role, singularize, RoleLexicon, RoleName};
pub use typology::{classify_action, ActionTypology};

/// Error in one of the plain-text vocabulary files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Snapshot {
    #[default]
    Initial,
    Latest,
}

impl Snapshot {
    pub const BOTH: [Snapshot; 2] = [Snapshot::Initial, Snapshot::Latest];

    pub fn as_str(self) -> &'static str {
        match self {
            Snapshot::Initial => "initial",
            Snapshot::Latest => "latest",
        }
    }
}

impl fmt::Display for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Byte span within the source sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn range(self) -> Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSpans {
    pub role: Span,
    pub deontic: Option<Span>,
    pub action: Span,
    pub object: Option<Span>,
}

/// Where a statement came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementSource {
    pub statement_id: String,
    pub repo_id: String,
    pub snapshot: Snapshot,
    pub sentence_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstitutionalStatement {
    pub source: StatementSource,
    /// The sentence the spans refer to.
    pub sentence: String,
    pub role_raw: String,
    pub role_canon: String,
    /// False when the role missed the lexicon.
    pub role_controlled: bool,
    pub deontic_raw: Option<String>,
    pub deontic_canon: DeonticType,
    pub polarity: Polarity,
    pub action_raw: String,
    pub action_lemma: String,
    pub action_type: String,
    pub object_raw: Option<String>,
    /// Lowercased, singularized object head noun.
    pub object_head: Option<String>,
    pub spans: ComponentSpans,
}

impl InstitutionalStatement {
    /// Checks that every span slices the sentence to its raw component text.
    pub fn spans_consistent(&self) -> bool {
        let slice = |span: Span| self.sentence.get(span.range());
        slice(self.spans.role) == Some(self.role_raw.as_str())
            && slice(self.spans.action) == Some(self.action_raw.as_str())
            && self.spans.deontic.map(slice) == self.deontic_raw.as_deref().map(Some)
            && self.spans.object.map(slice) == self.object_raw.as_deref().map(Some)
    }
}
