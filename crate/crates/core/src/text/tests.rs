use alloc::string::String;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::statement::RoleLexicon;

const SECTIONS_FIXTURE: &str = include_str!("../../tests/fixtures/markup/01_governance_sections.md");

fn norm(raw: &str) -> NormalizedDocument {
    Normalizer::default().normalize(raw)
}

#[test]
fn badge_only_line_is_removed() {
    let doc = norm("[![Build](https://img.shields.io/x.svg)](https://ci.example.org)\n\nMaintainers merge.\n");
    assert_eq!(doc.text, "Maintainers merge.");
    let doc = norm("![Coverage](https://img.shields.io/codecov/c/x)\n");
    assert_eq!(doc.text, "");
    assert!(doc.blocks.is_empty());
}

#[test]
fn table_rows_become_list_items() {
    let doc = norm("|role|right|\n|---|---|\n|maintainer|merge|\n");
    assert_eq!(doc.text, "- maintainer: merge");
    assert_eq!(doc.blocks.len(), 1);
    assert_eq!(doc.blocks[0].kind, BlockKind::ListItem);

    let doc = norm("| Team | Lead | Scope |\n|:--|:-:|--:|\n| core | Alice | runtime |\n| docs | Bob | site |\n");
    assert_eq!(doc.text, "- core: Alice; runtime\n\n- docs: Bob; site");
}

#[test]
fn headings_are_recorded_with_depth() {
    let doc = norm("## Decision Making\n\nThe chair decides.");
    assert_eq!(doc.sections, [Section { heading: "Decision Making".into(), depth: 2, start: 0 }]);
    assert_eq!(doc.text, "Decision Making\n\nThe chair decides.");
    let doc = norm("Model\n=====\n\nCommittee\n---------\n");
    let depths: Vec<u8> = doc.sections.iter().map(|s| s.depth).collect();
    assert_eq!(depths, [1, 2]);
}

#[test]
fn section_counts() {
    assert_eq!(count_sections(&norm("# A\n\ntext\n\n## B\n\n### C\n")), 3);
    assert_eq!(count_sections(&norm("no headings here")), 0);
    assert_eq!(count_sections(&norm(SECTIONS_FIXTURE)), 5);
}

#[test]
fn nested_lists_flatten_to_items() {
    let doc = norm("1. Maintainers\n   - Merge pull requests.\n     * Tag releases.\n2. Reviewers\n");
    assert_eq!(doc.text, "1. Maintainers\n\n- Merge pull requests.\n\n- Tag releases.\n\n2. Reviewers");
    assert!(doc.blocks.iter().all(|b| b.kind == BlockKind::ListItem));
}

#[test]
fn fenced_code_and_comments_are_dropped() {
    let doc = norm("Before.\n\n```\nlet x = 1;\n```\n\n<!-- a\nb -->\nAfter.");
    assert_eq!(doc.text, "Before.\n\nAfter.");
}

#[test]
fn fixture_offsets_survive() {
    let doc = norm(SECTIONS_FIXTURE);
    assert!(doc.offsets_consistent(SECTIONS_FIXTURE));
    let start = doc.text.find("technical committee").unwrap();
    let span = start..start + "technical committee".len();
    let original = doc.offset_map.to_original(span.clone()).unwrap();
    assert_eq!(&SECTIONS_FIXTURE[original.clone()], "technical committee");
    assert_eq!(doc.offset_map.to_normalized(original), Some(span));
}

fn markup_line() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(alloc::vec![
        "# ", "## ", "- ", "* ", "1. ", "   - ", "| a | b |", "|---|---|", "```", "> ", "**", "_", "`", "~~",
        "[link](http://x.org)", "![img](i.png)", "[![b](https://img.shields.io/b)](u)", "<b>", "</b>", "<!--",
        "-->", "Maintainers", "must", "merge", "They", "review.", "e.g.", " ", "\t", "===", "---", "[ref]: u",
        "[t][r]", "<https://x.org>", "é", "—", "(", ")", "[", "]", "!", ":", ";", "\\", "|", "#",
    ]);
    prop::collection::vec(pieces, 0..10).prop_map(|v| v.concat())
}

fn markup_doc() -> impl Strategy<Value = String> {
    prop::collection::vec(markup_line(), 0..12).prop_map(|lines| lines.join("\n"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn normalize_is_idempotent(raw in markup_doc()) {
        let once = norm(&raw);
        let twice = norm(&once.text);
        prop_assert_eq!(&twice.text, &once.text);
    }

    #[test]
    fn offsets_round_trip(raw in markup_doc()) {
        let doc = norm(&raw);
        prop_assert!(doc.offsets_consistent(&raw));
    }

    #[test]
    fn sentences_cover_blocks(raw in markup_doc()) {
        let normalizer = Normalizer::default();
        let doc = normalizer.normalize(&raw);
        let spans = segment(&doc, normalizer.abbreviations());
        let mut covered = alloc::vec![false; doc.text.len()];
        let mut last_end = 0;
        for span in &spans {
            prop_assert!(span.start < span.end);
            prop_assert!(span.start >= last_end);
            last_end = span.end;
            let block = doc.blocks[span.block_id];
            prop_assert!(block.start <= span.start && span.end <= block.end);
            covered[span.start..span.end].iter_mut().for_each(|c| *c = true);
        }
        for block in &doc.blocks {
            for (i, ch) in doc.text[block.start..block.end].char_indices() {
                prop_assert!(ch.is_whitespace() || covered[block.start + i]);
            }
        }
    }

    #[test]
    fn pronoun_resolution_keeps_structure(raw in markup_doc()) {
        let normalizer = Normalizer::default();
        let doc = normalizer.normalize(&raw);
        let spans = segment(&doc, normalizer.abbreviations());
        let res = resolve_pronouns(&doc, &spans, &RoleLexicon::default());
        prop_assert_eq!(res.sentences.len(), spans.len());
        prop_assert_eq!(res.document.blocks.len(), doc.blocks.len());
        prop_assert_eq!(revert_substitutions(&res.document.text, &res.log), doc.text);
    }
}
