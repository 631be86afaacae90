//! Normalization invariants over the markup fixture set.

use std::fs;
use std::path::PathBuf;

use govtrace_core::text::Normalizer;

fn fixtures() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/markup");
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "md"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn fixture_set_is_complete() {
    assert_eq!(fixtures().len(), 50);
}

#[test]
fn normalize_is_idempotent() {
    let normalizer = Normalizer::default();
    for (name, raw) in fixtures() {
        let once = normalizer.normalize(&raw);
        let twice = normalizer.normalize(&once.text);
        assert_eq!(twice.text, once.text, "{name}");
    }
}

#[test]
fn offsets_round_trip() {
    let normalizer = Normalizer::default();
    for (name, raw) in fixtures() {
        let doc = normalizer.normalize(&raw);
        assert!(doc.offsets_consistent(&raw), "{name}");
        for block in &doc.blocks {
            if let Some(original) = doc.offset_map.to_original(block.start..block.end) {
                assert_eq!(doc.offset_map.to_normalized(original), Some(block.start..block.end), "{name}");
            }
        }
    }
}

#[test]
fn badge_lines_and_blank_documents_leave_no_text() {
    let normalizer = Normalizer::default();
    for (name, raw) in fixtures() {
        let text = normalizer.normalize(&raw).text;
        if name.contains("badges_only") {
            assert!(!text.contains("http") && !text.contains("Coverage"), "{name}: {text:?}");
            assert!(text.contains("Maintainers decide."), "{name}: {text:?}");
        }
        if name.contains("empty") || name.contains("whitespace_only") {
            assert!(text.trim().is_empty(), "{name}: {text:?}");
        }
    }
}
