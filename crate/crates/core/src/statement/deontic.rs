use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ConfigError;

/// Closed set of canonical deontic types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DeonticType {
    May,
    Can,
    Should,
    Must,
    Will,
    Shall,
    ShouldNot,
    MustNot,
    Cannot,
    WillNot,
    None,
}

impl DeonticType {
    pub const ALL: [DeonticType; 11] = [
        DeonticType::May,
        DeonticType::Can,
        DeonticType::Should,
        DeonticType::Must,
        DeonticType::Will,
        DeonticType::Shall,
        DeonticType::ShouldNot,
        DeonticType::MustNot,
        DeonticType::Cannot,
        DeonticType::WillNot,
        DeonticType::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DeonticType::May => "MAY",
            DeonticType::Can => "CAN",
            DeonticType::Should => "SHOULD",
            DeonticType::Must => "MUST",
            DeonticType::Will => "WILL",
            DeonticType::Shall => "SHALL",
            DeonticType::ShouldNot => "SHOULD_NOT",
            DeonticType::MustNot => "MUST_NOT",
            DeonticType::Cannot => "CANNOT",
            DeonticType::WillNot => "WILL_NOT",
            DeonticType::None => "NONE",
        }
    }

    /// Plain-English surface form; empty for `None`.
    pub fn surface(self) -> &'static str {
        match self {
            DeonticType::May => "may",
            DeonticType::Can => "can",
            DeonticType::Should => "should",
            DeonticType::Must => "must",
            DeonticType::Will => "will",
            DeonticType::Shall => "shall",
            DeonticType::ShouldNot => "should not",
            DeonticType::MustNot => "must not",
            DeonticType::Cannot => "cannot",
            DeonticType::WillNot => "will not",
            DeonticType::None => "",
        }
    }

    /// The negated member, for example `MUST` to `MUST_NOT`.
    pub fn negated(self) -> DeonticType {
        match self {
            DeonticType::May | DeonticType::Can => DeonticType::Cannot,
            DeonticType::Should => DeonticType::ShouldNot,
            DeonticType::Must | DeonticType::Shall => DeonticType::MustNot,
            DeonticType::Will => DeonticType::WillNot,
            other => other,
        }
    }
}

impl fmt::Display for DeonticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeonticType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DeonticType::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown deontic type {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Polarity {
    Enabling,
    Restricting,
    None,
}

impl Polarity {
    pub fn name(self) -> &'static str {
        match self {
            Polarity::Enabling => "ENABLING",
            Polarity::Restricting => "RESTRICTING",
            Polarity::None => "NONE",
        }
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Polarity::Enabling, Polarity::Restricting, Polarity::None]
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown polarity {s:?}"))
    }
}

/// Folds a modal phrase for lookup: lowercase, typographic apostrophes,
/// single spaces.
fn fold_modal(text: &str) -> String {
    text.split_whitespace()
        .map(|w| w.to_lowercase().replace('\u{2019}', "'"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Surface modal phrase to deontic type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeonticMap {
    entries: BTreeMap<String, DeonticType>,
    max_words: usize,
}

impl Default for DeonticMap {
    fn default() -> Self {
        DeonticMap::parse(crate::defaults::DEONTICS_MAP).expect("bundled deontic map parses")
    }
}

impl DeonticMap {
    /// `surface<TAB>TYPE` per line.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (line, body) in crate::config_lines(source) {
            let (surface, kind) = body
                .split_once('\t')
                .ok_or_else(|| ConfigError::new(line, "expected surface<TAB>TYPE"))?;
            let kind: DeonticType = kind.parse().map_err(|e| ConfigError::new(line, e))?;
            let key = fold_modal(surface);
            if entries.insert(key.clone(), kind).is_some_and(|prev| prev != kind) {
                return Err(ConfigError::new(line, format!("conflicting entry for {key:?}")));
            }
        }
        let max_words = entries.keys().map(|k| k.split(' ').count()).max().unwrap_or(0);
        Ok(DeonticMap { entries, max_words })
    }

    pub fn get(&self, surface: &str) -> Option<DeonticType> {
        self.entries.get(&fold_modal(surface)).copied()
    }

    pub fn max_words(&self) -> usize {
        self.max_words
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, DeonticType)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Maps a modal phrase to its canonical type.
///
/// Listed phrases map directly. Otherwise a listed first word followed
/// anywhere by `not` or `never` maps to the negated member (`must also not`
/// gives `MUST_NOT`). Empty input is `NONE`; anything else is `NONE` with a
/// warning.
pub fn canonicalize_deontic(text: &str, map: &DeonticMap) -> DeonticType {
    let folded = fold_modal(text);
    if folded.is_empty() {
        return DeonticType::None;
    }
    if let Some(kind) = map.get(&folded) {
        return kind;
    }
    let mut words = folded.split(' ');
    let base = words.next().and_then(|w| map.get(w));
    let negated = words.any(|w| w == "not" || w == "never");
    match base {
        Some(kind) if negated => kind.negated(),
        _ => {
            log::warn!("unrecognized modal {text:?}; coded as NONE");
            DeonticType::None
        }
    }
}

/// Deontic type to polarity; total over [`DeonticType::ALL`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityTable {
    table: BTreeMap<DeonticType, Polarity>,
}

impl Default for PolarityTable {
    fn default() -> Self {
        PolarityTable::parse(crate::defaults::POLARITY_MAP).expect("bundled polarity map parses")
    }
}

impl PolarityTable {
    /// `TYPE<TAB>POLARITY` per line; every deontic type must be present.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut table = BTreeMap::new();
        let mut last_line = 0;
        for (line, body) in crate::config_lines(source) {
            last_line = line;
            let (kind, polarity) = body
                .split_once('\t')
                .ok_or_else(|| ConfigError::new(line, "expected TYPE<TAB>POLARITY"))?;
            let kind: DeonticType = kind.parse().map_err(|e| ConfigError::new(line, e))?;
            let polarity: Polarity = polarity.parse().map_err(|e| ConfigError::new(line, e))?;
            if table.insert(kind, polarity).is_some() {
                return Err(ConfigError::new(line, format!("duplicate entry for {kind}")));
            }
        }
        let missing: Vec<&str> = DeonticType::ALL.iter().filter(|d| !table.contains_key(d)).map(|d| d.name()).collect();
        if !missing.is_empty() {
            return Err(ConfigError::new(last_line, format!("polarity table is not total; missing {}", missing.join(", "))));
        }
        Ok(PolarityTable { table })
    }

    pub fn get(&self, kind: DeonticType) -> Polarity {
        self.table[&kind]
    }

    pub fn describe(&self) -> String {
        self.table.iter().map(|(k, v)| format!("{}={}", k.name(), v.name())).collect::<Vec<_>>().join(",")
    }
}

pub fn recode_polarity(kind: DeonticType, table: &PolarityTable) -> Polarity {
    table.get(kind)
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_modals() {
        let map = DeonticMap::default();
        assert_eq!(canonicalize_deontic("must", &map), DeonticType::Must);
        assert_eq!(canonicalize_deontic("May", &map), DeonticType::May);
        assert_eq!(canonicalize_deontic("must not", &map), DeonticType::MustNot);
        assert_eq!(canonicalize_deontic("may not", &map), DeonticType::Cannot);
        assert_eq!(canonicalize_deontic("won\u{2019}t", &map), DeonticType::WillNot);
        assert_eq!(canonicalize_deontic("must also not", &map), DeonticType::MustNot);
        assert_eq!(canonicalize_deontic("", &map), DeonticType::None);
        assert_eq!(canonicalize_deontic("ought", &map), DeonticType::None);
    }

    #[test]
    fn surface_round_trips() {
        let map = DeonticMap::default();
        for kind in DeonticType::ALL {
            assert_eq!(canonicalize_deontic(kind.surface(), &map), kind, "{kind}");
        }
    }

    #[test]
    fn default_polarity() {
        let table = PolarityTable::default();
        assert_eq!(recode_polarity(DeonticType::Can, &table), Polarity::Enabling);
        assert_eq!(recode_polarity(DeonticType::Cannot, &table), Polarity::Restricting);
        assert_eq!(recode_polarity(DeonticType::Must, &table), Polarity::Restricting);
        assert_eq!(recode_polarity(DeonticType::None, &table), Polarity::None);
    }

    #[test]
    fn partial_polarity_table_is_rejected() {
        let err = PolarityTable::parse("CAN\tENABLING\n").unwrap_err();
        assert!(err.message.contains("not total"));
    }

    #[test]
    fn malformed_deontic_lines() {
        assert!(DeonticMap::parse("must MUST\n").is_err());
        assert!(DeonticMap::parse("must\tMAYBE\n").is_err());
        assert!(DeonticMap::parse("must\tMUST\nmust\tMAY\n").is_err());
    }
}
