use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ConfigError;

pub const NULL_LABEL: &str = "null";

/// Ordered action labels and the verbs assigned to each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTypology {
    labels: Vec<String>,
    verbs: BTreeMap<String, usize>,
    null: usize,
}

impl Default for ActionTypology {
    fn default() -> Self {
        ActionTypology::parse(crate::defaults::TYPOLOGY_MAP).expect("bundled typology parses")
    }
}

impl ActionTypology {
    /// `label<TAB>verb verb ...` per line; a `null` line is required.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut labels: Vec<String> = Vec::new();
        let mut verbs = BTreeMap::new();
        for (line, body) in crate::config_lines(source) {
            let (label, list) = body.split_once('\t').unwrap_or((body, ""));
            let label = label.trim();
            if labels.iter().any(|l| l == label) {
                return Err(ConfigError::new(line, format!("label {label:?} listed twice")));
            }
            let index = labels.len();
            labels.push(label.to_string());
            for verb in list.split_whitespace() {
                let verb = verb.to_lowercase();
                if let Some(&other) = verbs.get(&verb) {
                    if other != index {
                        return Err(ConfigError::new(
                            line,
                            format!("verb {verb:?} assigned to both {:?} and {label:?}", labels[other]),
                        ));
                    }
                }
                verbs.insert(verb, index);
            }
        }
        let null = labels
            .iter()
            .position(|l| l == NULL_LABEL)
            .ok_or_else(|| ConfigError::new(0, "typology has no null label"))?;
        Ok(ActionTypology { labels, verbs, null })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn null_label(&self) -> &str {
        &self.labels[self.null]
    }

    pub fn is_mapped(&self, lemma: &str) -> bool {
        self.verbs.contains_key(lemma)
    }

    pub fn verbs(&self) -> impl Iterator<Item = &str> {
        self.verbs.keys().map(String::as_str)
    }

    /// Label for a verb lemma; unmapped lemmas get the null label.
    pub fn classify(&self, lemma: &str) -> &str {
        let index = self.verbs.get(&lemma.to_lowercase()).copied().unwrap_or(self.null);
        &self.labels[index]
    }
}

pub fn classify_action<'a>(lemma: &str, typology: &'a ActionTypology) -> &'a str {
    typology.classify(lemma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_typology_has_nine_labels() {
        let typology = ActionTypology::default();
        assert_eq!(typology.labels().len(), 9);
        assert_eq!(typology.null_label(), "null");
        assert_eq!(classify_action("vote", &typology), "aggregation");
        assert_eq!(classify_action("merge", &typology), "choice");
        assert_eq!(classify_action("zzzunknown", &typology), "null");
    }

    #[test]
    fn double_assignment_and_missing_null_fail() {
        assert!(ActionTypology::parse("a\tvote\nb\tvote\nnull\n").is_err());
        assert!(ActionTypology::parse("a\tvote\n").is_err());
        assert!(ActionTypology::parse("a\tvote\na\tmerge\nnull\n").is_err());
    }
}
