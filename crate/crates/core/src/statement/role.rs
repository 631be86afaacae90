use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ConfigError;

const IRREGULAR_PLURALS: &[(&str, &str)] =
    &[("people", "person"), ("children", "child"), ("men", "man"), ("women", "woman"), ("chairpeople", "chairperson")];
const INVARIANT: &[&str] = &["series", "news", "species", "status", "bus", "process", "access", "analysis"];

/// Singularizes one lowercase English noun by suffix rules.
pub fn singularize(word: &str) -> String {
    if let Some((_, singular)) = IRREGULAR_PLURALS.iter().find(|(plural, _)| *plural == word) {
        return (*singular).to_string();
    }
    if INVARIANT.contains(&word) || word.len() <= 3 {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        return format!("{stem}y");
    }
    for suffix in ["sses", "shes", "ches", "xes", "zes"] {
        if word.ends_with(suffix) {
            return word[..word.len() - 2].to_string();
        }
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return word.to_string();
    }
    match word.strip_suffix('s') {
        Some(stem) => stem.to_string(),
        None => word.to_string(),
    }
}

/// Lowercases, treats hyphens and underscores as spaces, and collapses
/// whitespace.
fn fold(surface: &str) -> String {
    surface
        .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn singularize_last(folded: &str) -> String {
    match folded.rsplit_once(' ') {
        Some((head, last)) => format!("{head} {}", singularize(last)),
        None => singularize(folded),
    }
}

/// A canonical role name and whether it came from the lexicon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleName {
    pub canonical: String,
    pub controlled: bool,
}

/// Surface variant to canonical role name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleLexicon {
    entries: BTreeMap<String, String>,
    max_words: usize,
}

impl Default for RoleLexicon {
    fn default() -> Self {
        RoleLexicon::parse(crate::defaults::ROLES_LEXICON).expect("bundled role lexicon parses")
    }
}

impl RoleLexicon {
    /// `variant<TAB>canonical` per line, or a lone canonical name.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (line, body) in crate::config_lines(source) {
            let (variant, canonical) = match body.split_once('\t') {
                Some((v, c)) => (v.trim(), c.trim()),
                None => (body, body),
            };
            if canonical != fold(canonical) {
                return Err(ConfigError::new(line, format!("canonical role {canonical:?} must be lowercase")));
            }
            if singularize_last(canonical) != canonical {
                return Err(ConfigError::new(line, format!("canonical role {canonical:?} must be singular")));
            }
            let mut insert = |key: String| -> Result<(), ConfigError> {
                match entries.get(&key) {
                    Some(existing) if existing != canonical => Err(ConfigError::new(
                        line,
                        format!("variant {key:?} maps to both {existing:?} and {canonical:?}"),
                    )),
                    _ => {
                        entries.insert(key, canonical.to_string());
                        Ok(())
                    }
                }
            };
            insert(fold(variant))?;
            insert(fold(canonical))?;
        }
        let max_words = entries.keys().map(|k| k.split(' ').count()).max().unwrap_or(0);
        Ok(RoleLexicon { entries, max_words })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest variant in words.
    pub fn max_words(&self) -> usize {
        self.max_words
    }

    /// Canonical name for a surface form, if listed.
    pub fn lookup(&self, surface: &str) -> Option<&str> {
        let folded = fold(surface);
        if folded.is_empty() {
            return None;
        }
        self.entries
            .get(&folded)
            .or_else(|| self.entries.get(&singularize_last(&folded)))
            .map(String::as_str)
    }

    pub fn normalize(&self, surface: &str) -> RoleName {
        match self.lookup(surface) {
            Some(canonical) => RoleName { canonical: canonical.to_string(), controlled: true },
            None => RoleName { canonical: singularize_last(&fold(surface)), controlled: false },
        }
    }
}

pub fn normalize_role(surface: &str, lexicon: &RoleLexicon) -> RoleName {
    lexicon.normalize(surface)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_roles() {
        let lexicon = RoleLexicon::default();
        let hit = |s: &str| lexicon.normalize(s);
        assert_eq!(hit("Committers"), RoleName { canonical: "committer".into(), controlled: true });
        assert_eq!(hit("Release Managers").canonical, "release manager");
        assert_eq!(hit("release-manager").canonical, "release manager");
        assert_eq!(hit("TSC").canonical, "technical steering committee");
        assert_eq!(hit("Project Leaders").canonical, "project lead");
    }

    #[test]
    fn unlisted_role_passes_through_flagged() {
        let role = normalize_role("benevolent dictator", &RoleLexicon::default());
        assert_eq!(role, RoleName { canonical: "benevolent dictator".into(), controlled: false });
        assert_eq!(normalize_role("Benevolent Dictators", &RoleLexicon::default()).canonical, "benevolent dictator");
    }

    #[test]
    fn singular_rules() {
        for (plural, singular) in [
            ("maintainers", "maintainer"),
            ("committees", "committee"),
            ("policies", "policy"),
            ("branches", "branch"),
            ("boxes", "box"),
            ("people", "person"),
            ("status", "status"),
            ("process", "process"),
            ("address", "address"),
            ("bus", "bus"),
            ("roadmap", "roadmap"),
        ] {
            assert_eq!(singularize(plural), singular, "{plural}");
        }
    }

    #[test]
    fn lexicon_must_be_functional_and_lowercase() {
        assert!(RoleLexicon::parse("lead\tproject lead\nlead\ttech lead\n").is_err());
        assert!(RoleLexicon::parse("Maintainer\n").is_err());
        assert!(RoleLexicon::parse("maintainers\n").is_err());
        let lexicon = RoleLexicon::parse("boss\tmaintainer\n# comment\n\nmaintainer\n").unwrap();
        assert_eq!(lexicon.lookup("Bosses"), Some("maintainer"));
        assert_eq!(lexicon.max_words(), 1);
    }
}
