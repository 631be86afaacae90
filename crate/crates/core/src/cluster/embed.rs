//! Lexical embeddings: word and padded character-trigram counts weighted by
//! smoothed inverse document frequency over the job, then L2-normalized.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ClusterError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingSource {
    DefaultLexical,
    Imported,
}

/// Unit-norm vector for one statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementVector {
    pub statement_id: String,
    pub vector: Vec<f64>,
    pub source: EmbeddingSource,
}

/// Lowercase alphanumeric words of a text.
pub fn terms(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_lowercase).collect()
}

fn features(text: &str) -> BTreeMap<String, f64> {
    let mut tf = BTreeMap::new();
    for word in terms(text) {
        let padded: Vec<char> = core::iter::once('#').chain(word.chars()).chain(core::iter::once('#')).collect();
        for tri in padded.windows(3) {
            *tf.entry(format!("t:{}", tri.iter().collect::<String>())).or_insert(0.0) += 1.0;
        }
        *tf.entry(format!("w:{word}")).or_insert(0.0) += 1.0;
    }
    tf
}

fn unit(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>) -> Result<(), ClusterError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ClusterError::DuplicateId(id.into()));
        }
    }
    Ok(())
}

/// Embeds `(statement_id, text)` pairs with the default lexical encoder.
pub fn embed_lexical(items: &[(String, String)]) -> Result<Vec<StatementVector>, ClusterError> {
    if items.is_empty() {
        return Err(ClusterError::EmptyInput);
    }
    check_unique(items.iter().map(|(id, _)| id.as_str()))?;
    let tfs: Vec<BTreeMap<String, f64>> = items.iter().map(|(_, text)| features(text)).collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tf in &tfs {
        for key in tf.keys() {
            *df.entry(key.as_str()).or_insert(0) += 1;
        }
    }
    let n = items.len() as f64;
    let vocab: BTreeMap<&str, (usize, f64)> = df
        .iter()
        .enumerate()
        .map(|(i, (key, &d))| (*key, (i, libm::log((1.0 + n) / (1.0 + d as f64)) + 1.0)))
        .collect();
    items
        .iter()
        .zip(&tfs)
        .map(|((id, _), tf)| {
            let mut v = alloc::vec![0.0; vocab.len()];
            for (key, count) in tf {
                let (i, idf) = vocab[key.as_str()];
                v[i] = count * idf;
            }
            let vector = unit(v).ok_or_else(|| ClusterError::ZeroVector(id.clone()))?;
            Ok(StatementVector { statement_id: id.clone(), vector, source: EmbeddingSource::DefaultLexical })
        })
        .collect()
}

/// Looks up externally produced vectors for `ids` and normalizes them.
pub fn embed_imported(ids: &[String], sidecar: &BTreeMap<String, Vec<f64>>) -> Result<Vec<StatementVector>, ClusterError> {
    if ids.is_empty() {
        return Err(ClusterError::EmptyInput);
    }
    check_unique(ids.iter().map(String::as_str))?;
    let missing: Vec<String> = ids.iter().filter(|id| !sidecar.contains_key(*id)).cloned().collect();
    if !missing.is_empty() {
        return Err(ClusterError::MissingVectors(missing));
    }
    let expected = sidecar[&ids[0]].len();
    ids.iter()
        .map(|id| {
            let raw = &sidecar[id];
            if raw.len() != expected {
                return Err(ClusterError::DimensionMismatch { statement_id: id.clone(), expected, found: raw.len() });
            }
            let vector = unit(raw.clone()).ok_or_else(|| ClusterError::ZeroVector(id.clone()))?;
            Ok(StatementVector { statement_id: id.clone(), vector, source: EmbeddingSource::Imported })
        })
        .collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn items(texts: &[&str]) -> Vec<(String, String)> {
        texts.iter().enumerate().map(|(i, t)| (format!("s{i}"), t.to_string())).collect()
    }

    #[test]
    fn identical_texts_have_identical_vectors() {
        let v = embed_lexical(&items(&["review patch", "review patch", "elect chair"])).unwrap();
        assert_eq!(v[0].vector, v[1].vector);
        assert!((cosine(&v[0].vector, &v[1].vector) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_texts_are_far_apart() {
        let v = embed_lexical(&items(&["merge pull request", "approve release"])).unwrap();
        // Only the padded trigram "#re" is shared.
        assert!(cosine(&v[0].vector, &v[1].vector) < 0.3);
    }

    #[test]
    fn vectors_have_unit_norm() {
        let v = embed_lexical(&items(&["a", "vote on release", "vote", "the chair of the board"])).unwrap();
        for sv in v {
            let norm = libm::sqrt(cosine(&sv.vector, &sv.vector));
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_and_blank_inputs_fail() {
        assert_eq!(embed_lexical(&[]), Err(ClusterError::EmptyInput));
        assert_eq!(embed_lexical(&items(&["ok", "  "])), Err(ClusterError::ZeroVector("s1".into())));
        assert_eq!(embed_lexical(&[items(&["ok"]), items(&["ok"])].concat()), Err(ClusterError::DuplicateId("s0".into())));
    }

    #[test]
    fn imported_vectors_are_checked() {
        let mut sidecar = BTreeMap::new();
        sidecar.insert("a".to_string(), vec![3.0, 4.0]);
        sidecar.insert("b".to_string(), vec![1.0]);
        let ids = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let v = embed_imported(&ids(&["a"]), &sidecar).unwrap();
        assert_eq!(v[0].vector, [0.6, 0.8]);
        assert_eq!(v[0].source, EmbeddingSource::Imported);
        assert_eq!(
            embed_imported(&ids(&["a", "x", "y"]), &sidecar),
            Err(ClusterError::MissingVectors(ids(&["x", "y"])))
        );
        assert!(matches!(embed_imported(&ids(&["a", "b"]), &sidecar), Err(ClusterError::DimensionMismatch { .. })));
    }
}
