//! Shared scripted repositories for integration tests.

#![allow(dead_code)]

use std::path::Path;

use govtrace::config::RepoEntry;
use govtrace::fixture::RepoBuilder;

/// What mining one fixture repository must produce.
#[derive(Debug, Clone)]
pub struct ExpectedPairing {
    pub repo_id: &'static str,
    pub exclusion: Option<&'static str>,
    pub initial: Option<String>,
    pub latest: Option<String>,
    pub gap_days: Option<i64>,
    pub across_day: Option<bool>,
    pub files: Vec<&'static str>,
    pub latest_file_count: Option<usize>,
}

const RULES_A: &str = "# Governance\n\nMaintainers must review patches.\n";
const RULES_B: &str = "# Governance\n\nMaintainers must review patches.\n\nReviewers may merge branches.\n";

/// Five repositories covering the pairing rules: one governance commit,
/// two commits on one UTC day, several days, a rename and two files.
pub fn pairing_fixture(root: &Path) -> (Vec<RepoEntry>, Vec<ExpectedPairing>) {
    let mut entries = Vec::new();
    let mut expected = Vec::new();
    let mut entry = |name: &str| {
        let dir = root.join(name);
        entries.push(RepoEntry { repo_id: name.to_string(), path: dir.clone() });
        RepoBuilder::init(&dir).unwrap()
    };

    let repo = entry("single-commit");
    repo.write("GOVERNANCE.md", RULES_A).unwrap();
    repo.commit("governance", "2020-01-10T12:00:00+00:00").unwrap();
    repo.write("README.md", "readme\n").unwrap();
    repo.commit("readme", "2020-02-10T12:00:00+00:00").unwrap();
    expected.push(ExpectedPairing {
        repo_id: "single-commit",
        exclusion: Some("single-snapshot"),
        initial: None,
        latest: None,
        gap_days: None,
        across_day: None,
        files: vec!["GOVERNANCE.md"],
        latest_file_count: None,
    });

    // 22:00 at +02:00 is 20:00 UTC, the same calendar day as 01:00 UTC.
    let repo = entry("same-day");
    repo.write("GOVERNANCE.md", RULES_A).unwrap();
    let first = repo.commit("governance", "2020-05-04T01:00:00+00:00").unwrap();
    repo.write("GOVERNANCE.md", RULES_B).unwrap();
    let second = repo.commit("more governance", "2020-05-04T22:00:00+02:00").unwrap();
    expected.push(ExpectedPairing {
        repo_id: "same-day",
        exclusion: None,
        initial: Some(first),
        latest: Some(second),
        gap_days: Some(0),
        across_day: Some(false),
        files: vec!["GOVERNANCE.md"],
        latest_file_count: Some(1),
    });

    let repo = entry("multi-day");
    repo.write("GOVERNANCE.md", RULES_A).unwrap();
    let first = repo.commit("governance", "2019-02-01T08:00:00+00:00").unwrap();
    repo.write("GOVERNANCE.md", RULES_B).unwrap();
    repo.commit("edit", "2019-06-15T08:00:00+00:00").unwrap();
    repo.write("GOVERNANCE.md", &format!("{RULES_B}\nMembers can vote.\n")).unwrap();
    let last = repo.commit("edit again", "2020-02-01T08:00:00+00:00").unwrap();
    repo.write("src.txt", "code\n").unwrap();
    repo.commit("code", "2020-03-01T08:00:00+00:00").unwrap();
    expected.push(ExpectedPairing {
        repo_id: "multi-day",
        exclusion: None,
        initial: Some(first),
        latest: Some(last),
        gap_days: Some(365),
        across_day: Some(true),
        files: vec!["GOVERNANCE.md"],
        latest_file_count: Some(1),
    });

    let repo = entry("renamed-file");
    repo.write("GOVERNANCE.md", RULES_A).unwrap();
    let first = repo.commit("governance", "2018-03-01T10:00:00+00:00").unwrap();
    repo.rename("GOVERNANCE.md", "governance.rst").unwrap();
    repo.write("governance.rst", RULES_B).unwrap();
    let renamed = repo.commit("rename", "2018-03-11T10:00:00+00:00").unwrap();
    expected.push(ExpectedPairing {
        repo_id: "renamed-file",
        exclusion: None,
        initial: Some(first),
        latest: Some(renamed),
        gap_days: Some(10),
        across_day: Some(true),
        files: vec!["GOVERNANCE.md", "governance.rst"],
        latest_file_count: Some(1),
    });

    let repo = entry("two-files");
    repo.write("GOVERNANCE.md", RULES_A).unwrap();
    let first = repo.commit("governance", "2021-07-01T10:00:00+00:00").unwrap();
    repo.write("GOVERNANCE-POLICY.md", "# Policy\n\nMembers can vote on releases.\n").unwrap();
    let second = repo.commit("policy", "2021-07-04T10:00:00+00:00").unwrap();
    expected.push(ExpectedPairing {
        repo_id: "two-files",
        exclusion: None,
        initial: Some(first),
        latest: Some(second),
        gap_days: Some(3),
        across_day: Some(true),
        files: vec!["GOVERNANCE-POLICY.md", "GOVERNANCE.md"],
        latest_file_count: Some(2),
    });

    (entries, expected)
}

/// Differences between mined records and the expected outcomes.
pub fn pairing_mismatches(records: &[govtrace::mine::PairRecord], expected: &[ExpectedPairing]) -> Vec<String> {
    let mut out = Vec::new();
    if records.len() != expected.len() {
        out.push(format!("{} records for {} repositories", records.len(), expected.len()));
    }
    for want in expected {
        let Some(got) = records.iter().find(|r| r.repo_id == want.repo_id) else {
            out.push(format!("{}: missing", want.repo_id));
            continue;
        };
        let mut check = |what: &str, same: bool, detail: String| {
            if !same {
                out.push(format!("{}: {what} {detail}", want.repo_id));
            }
        };
        let exclusion = got.exclusion.map(|e| e.as_str());
        check("exclusion", exclusion == want.exclusion, format!("{exclusion:?} != {:?}", want.exclusion));
        let initial = got.initial.as_ref().map(|s| s.commit_id.clone());
        check("initial", initial == want.initial, format!("{initial:?} != {:?}", want.initial));
        let latest = got.latest.as_ref().map(|s| s.commit_id.clone());
        check("latest", latest == want.latest, format!("{latest:?} != {:?}", want.latest));
        check("gap_days", got.gap_days == want.gap_days, format!("{:?} != {:?}", got.gap_days, want.gap_days));
        check("across_day", got.across_day == want.across_day, format!("{:?} != {:?}", got.across_day, want.across_day));
        let files: Vec<&str> = got.files.iter().map(|f| f.path.as_str()).collect();
        check("files", files == want.files, format!("{files:?} != {:?}", want.files));
        let count = got.latest.as_ref().map(|s| s.file_count);
        check("latest file count", count == want.latest_file_count, format!("{count:?} != {:?}", want.latest_file_count));
    }
    out
}
