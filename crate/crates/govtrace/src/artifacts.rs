//! Reading and writing stage artifacts.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, Stage};

pub const PAIRS: &str = "pairs.jsonl";
pub const CORPUS_STATS: &str = "corpus_stats.json";
pub const NORMALIZED_DIR: &str = "normalized";
pub const STATEMENTS: &str = "statements.jsonl";
pub const CLUSTERS: &str = "clusters.jsonl";
pub const CLUSTER_LABELS: &str = "cluster_labels.jsonl";
pub const METRICS: &str = "metrics.csv";
pub const DISTRIBUTIONS: &str = "distributions.jsonl";
pub const AGGREGATES: &str = "aggregates.csv";
pub const TABLE_ENTROPY_TXT: &str = "table_entropy.txt";
pub const TABLE_ENTROPY_CSV: &str = "table_entropy.csv";
pub const TABLE_COUNTS_TXT: &str = "table_counts.txt";
pub const TABLE_COUNTS_CSV: &str = "table_counts.csv";
pub const COMPOSITION: &str = "composition_latest.csv";
pub const RICHNESS: &str = "richness_by_snapshot.csv";
pub const EXCLUSIONS: &str = "exclusions.csv";
pub const MANIFEST: &str = "run_manifest.json";

fn create(stage: Stage, path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(stage, parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(stage, path, e))
}

pub fn write_jsonl<T: Serialize>(stage: Stage, path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = create(stage, path)?;
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(|e| Error::io(stage, path, e))?;
        out.write_all(b"\n").map_err(|e| Error::io(stage, path, e))?;
    }
    out.flush().map_err(|e| Error::io(stage, path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(stage: Stage, path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(stage, path, format!("{e} (run the previous stage first)")))?;
    let mut items = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(stage, path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| Error::io(stage, path, format!("line {}: {e}", idx + 1)))?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_json<T: Serialize>(stage: Stage, path: &Path, value: &T) -> Result<()> {
    let mut out = create(stage, path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::io(stage, path, e))?;
    out.write_all(b"\n").map_err(|e| Error::io(stage, path, e))?;
    out.flush().map_err(|e| Error::io(stage, path, e))
}

pub fn read_json<T: DeserializeOwned>(stage: Stage, path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(stage, path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::io(stage, path, e))
}

/// Writes a CSV whose first line is a `#` comment carrying the run header.
pub fn write_csv<T: Serialize>(stage: Stage, path: &Path, header: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = create(stage, path)?;
    writeln!(out, "# {header}").map_err(|e| Error::io(stage, path, e))?;
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::io(stage, path, e))?;
    }
    writer.flush().map_err(|e| Error::io(stage, path, e))
}

/// Writes a CSV with explicit string records, for tables whose columns are
/// not a fixed struct.
pub fn write_csv_records(stage: Stage, path: &Path, header: &str, records: &[Vec<String>]) -> Result<()> {
    let mut out = create(stage, path)?;
    writeln!(out, "# {header}").map_err(|e| Error::io(stage, path, e))?;
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        writer.write_record(record).map_err(|e| Error::io(stage, path, e))?;
    }
    writer.flush().map_err(|e| Error::io(stage, path, e))
}

pub fn read_csv<T: DeserializeOwned>(stage: Stage, path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::io(stage, path, format!("{e} (run the previous stage first)")))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::io(stage, path, e))
}

pub fn write_text(stage: Stage, path: &Path, text: &str) -> Result<()> {
    let mut out = create(stage, path)?;
    out.write_all(text.as_bytes()).map_err(|e| Error::io(stage, path, e))?;
    out.flush().map_err(|e| Error::io(stage, path, e))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Every regular file under `root`, as sorted `/`-separated relative paths.
pub fn list_files(root: &Path) -> std::io::Result<Vec<String>> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else if let Ok(rel) = path.strip_prefix(root) {
                out.push(rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    if root.is_dir() {
        walk(root, root, &mut out)?;
    }
    out.sort();
    Ok(out)
}

/// File name component safe for any filesystem.
pub fn safe_component(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect()
}

pub fn normalized_path(out: &Path, repo_id: &str, commit_id: &str) -> PathBuf {
    out.join(NORMALIZED_DIR).join(safe_component(repo_id)).join(format!("{}.json", safe_component(commit_id)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        name: String,
        value: Option<f64>,
    }

    #[test]
    fn csv_round_trip_skips_header_comment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let rows = vec![Row { name: "a".into(), value: Some(0.1) }, Row { name: "b".into(), value: None }];
        write_csv(Stage::Metrics, &path, "govtrace seed=1", &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# govtrace seed=1\nname,value\na,0.1\nb,\n"));
        assert_eq!(read_csv::<Row>(Stage::Report, &path).unwrap(), rows);
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/x.jsonl");
        let rows = vec![Row { name: "a".into(), value: Some(1.5) }];
        write_jsonl(Stage::Parse, &path, &rows).unwrap();
        assert_eq!(read_jsonl::<Row>(Stage::Cluster, &path).unwrap(), rows);
        assert_eq!(list_files(dir.path()).unwrap(), ["nested/x.jsonl"]);
    }

    #[test]
    fn missing_input_is_a_stage_error() {
        let err = read_jsonl::<Row>(Stage::Cluster, Path::new("/nonexistent/statements.jsonl")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("stage cluster"));
    }
}
