mod common;

use govtrace::config::Subset;
use govtrace::mine::{mine_corpus, PatternSet};
use govtrace::pipeline::selected_repos;
use govtrace_core::text::Normalizer;

#[test]
fn scripted_repositories_pair_as_expected() {
    let dir = tempfile::tempdir().unwrap();
    let (entries, expected) = common::pairing_fixture(dir.path());
    let patterns = PatternSet::parse(govtrace::config::DEFAULT_PATTERNS).unwrap();
    let mining = mine_corpus(&entries, &patterns, &Normalizer::default()).unwrap();
    let mismatches = common::pairing_mismatches(&mining.records, &expected);
    assert!(mismatches.is_empty(), "{mismatches:#?}");

    let across: Vec<&str> = selected_repos(&mining.records, Subset::AcrossDay).iter().map(|r| r.repo_id.as_str()).collect();
    assert_eq!(across, ["multi-day", "renamed-file", "two-files"]);
    let all: Vec<&str> = selected_repos(&mining.records, Subset::All).iter().map(|r| r.repo_id.as_str()).collect();
    assert_eq!(all, ["multi-day", "renamed-file", "same-day", "two-files"]);

    assert_eq!(mining.stats.n_repos, 5);
    assert_eq!(mining.stats.n_paired, 4);
    assert_eq!(mining.stats.n_across_day, 3);
}

#[test]
fn composite_latest_snapshot_holds_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let (entries, _) = common::pairing_fixture(dir.path());
    let patterns = PatternSet::parse(govtrace::config::DEFAULT_PATTERNS).unwrap();
    let mining = mine_corpus(&entries, &patterns, &Normalizer::default()).unwrap();
    let two = mining.records.iter().find(|r| r.repo_id == "two-files").unwrap();
    let text = &two.latest.as_ref().unwrap().raw_text;
    let policy = text.find("Members can vote on releases.").unwrap();
    let rules = text.find("Maintainers must review patches.").unwrap();
    assert!(policy < rules, "files are concatenated in case-folded path order");
}
