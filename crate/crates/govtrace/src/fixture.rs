//! Scripted git repositories for tests and demonstrations.
//!
//! [`RepoBuilder`] drives the `git` binary with fixed identities and dates so
//! commit ids are reproducible. [`write_planted_corpus`] builds a small
//! corpus whose latest snapshots add new roles and actions while deontic
//! usage is drawn from one fixed distribution in both snapshots.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;

use govtrace_core::seed;

/// Builds a repository commit by commit.
#[derive(Debug, Clone)]
pub struct RepoBuilder {
    root: PathBuf,
}

impl RepoBuilder {
    pub fn init(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        let builder = RepoBuilder { root: root.to_path_buf() };
        builder.git(&["init", "-q"], None)?;
        builder.git(&["symbolic-ref", "HEAD", "refs/heads/main"], None)?;
        Ok(builder)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn git(&self, args: &[&str], date: Option<&str>) -> io::Result<String> {
        let mut cmd = Command::new("git");
        cmd.arg("-C")
            .arg(&self.root)
            .args(["-c", "user.name=Fixture", "-c", "user.email=fixture@example.org", "-c", "commit.gpgsign=false"])
            .args(args)
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env_remove("GIT_DIR")
            .env_remove("GIT_WORK_TREE");
        if let Some(date) = date {
            cmd.env("GIT_AUTHOR_DATE", date).env("GIT_COMMITTER_DATE", date);
        }
        let output = cmd.output()?;
        if !output.status.success() {
            return Err(io::Error::other(format!(
                "git {} failed: {}",
                args.join(" "),
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        Ok(String::from_utf8_lossy(&output.stdout).trim().to_string())
    }

    pub fn write(&self, path: &str, content: &str) -> io::Result<&Self> {
        let full = self.root.join(path);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(full, content)?;
        Ok(self)
    }

    pub fn remove(&self, path: &str) -> io::Result<&Self> {
        fs::remove_file(self.root.join(path))?;
        Ok(self)
    }

    pub fn rename(&self, from: &str, to: &str) -> io::Result<&Self> {
        fs::rename(self.root.join(from), self.root.join(to))?;
        Ok(self)
    }

    /// Commits every change in the work tree; `date` is an ISO-8601
    /// timestamp with offset, used for author and committer. Returns the id.
    pub fn commit(&self, message: &str, date: &str) -> io::Result<String> {
        self.git(&["add", "-A"], None)?;
        self.git(&["commit", "-q", "-m", message], Some(date))?;
        self.git(&["rev-parse", "HEAD"], None)
    }
}

const BASE_ROLES: [&str; 4] = ["Maintainers", "Reviewers", "Moderators", "Sponsors"];
const NEW_ROLES: [&str; 4] = ["The steering committee", "The security team", "Release managers", "Working groups"];
const BASE_ACTIONS: [(&str, &str); 4] =
    [("review", "patches"), ("merge", "branches"), ("triage", "issues"), ("label", "tickets")];
const NEW_ACTIONS: [(&str, &str); 4] =
    [("elect", "delegates"), ("audit", "budgets"), ("publish", "roadmaps"), ("ratify", "charters")];
/// Modal inventory and weights shared by both snapshots.
const MODALS: [(&str, u64); 6] = [("must", 4), ("should", 2), ("may", 3), ("can", 2), ("will", 1), ("must not", 1)];

fn draw(seed: u64, labels: &[&str]) -> u64 {
    seed::derive(seed, labels.iter().copied())
}

/// Picks `k` distinct items from `pool` with a seeded partial shuffle.
fn pick<T: Copy>(pool: &[T], k: usize, seed: u64) -> Vec<T> {
    let mut items = pool.to_vec();
    let mut state = seed;
    for i in 0..k {
        state = seed::splitmix64(state);
        let j = i + (state % (items.len() - i) as u64) as usize;
        items.swap(i, j);
    }
    items.truncate(k);
    items
}

fn modal(seed: u64) -> &'static str {
    let total: u64 = MODALS.iter().map(|(_, w)| w).sum();
    let mut r = seed % total;
    for (m, w) in MODALS {
        if r < w {
            return m;
        }
        r -= w;
    }
    unreachable!("weights cover the range")
}

/// Governance rules of one snapshot: `(role, action)` index pairs over the
/// chosen pools, each role and action used three times.
fn rule_lines(repo: &str, snapshot: &str, roles: &[&str], actions: &[(&str, &str)], seed: u64) -> Vec<String> {
    let (r, a) = (roles.len(), actions.len());
    (0..r * 3)
        .map(|j| {
            let role = roles[j % r];
            let (verb, object) = actions[(j + j / r) % a];
            let m = modal(draw(seed, &[repo, snapshot, &j.to_string(), role]));
            let article = if draw(seed, &[repo, "article", &j.to_string()]) % 2 == 0 { "" } else { "the " };
            format!("{role} {m} {verb} {article}{object}.")
        })
        .collect()
}

fn document(title: &str, sections: &[(&str, Vec<String>)], badge: bool) -> String {
    let mut out = String::new();
    if badge {
        out.push_str("[![Build](https://img.shields.io/badge/build-passing-green.svg)](https://ci.example.org)\n\n");
    }
    out.push_str(&format!("# {title}\n\n"));
    out.push_str("This document describes how the project is run.\n\n");
    for (heading, lines) in sections {
        out.push_str(&format!("## {heading}\n\n"));
        for line in lines {
            out.push_str(&format!("- {line}\n"));
        }
        out.push('\n');
    }
    out
}

/// One repository of the planted corpus. Returns its directory.
pub fn planted_repo(root: &Path, index: usize, seed: u64) -> io::Result<PathBuf> {
    let name = format!("repo-{:02}", index + 1);
    let dir = root.join(&name);
    let s = draw(seed, &[&name]);
    let base_roles = pick(&BASE_ROLES, 3, s ^ 1);
    let base_actions = pick(&BASE_ACTIONS, 3, s ^ 2);
    let new_roles = pick(&NEW_ROLES, 2, s ^ 3);
    let new_actions = pick(&NEW_ACTIONS, 2, s ^ 4);

    let initial_rules = rule_lines(&name, "initial", &base_roles, &base_actions, seed);
    let latest_rules = rule_lines(&name, "latest", &base_roles, &base_actions, seed);
    let added_rules = rule_lines(&name, "added", &new_roles, &new_actions, seed);

    let day = 1 + (s % 20) as u32;
    let month = 1 + (s % 9) as u32;
    let start = format!("2019-{month:02}-{day:02}");
    let later = format!("2021-{month:02}-{day:02}");
    let repo = RepoBuilder::init(&dir)?;
    repo.write("README.md", &format!("# {name}\n\nA sample project.\n"))?
        .write("src/lib.rs", "pub fn answer() -> u32 {\n    42\n}\n")?;
    repo.commit("Initial import", &format!("{start}T09:00:00+00:00"))?;

    let initial = document("Governance", &[("Roles and responsibilities", initial_rules.clone())], index % 3 == 0);
    repo.write("GOVERNANCE.md", &initial)?;
    repo.commit("Add governance", &format!("{start}T15:30:00+00:00"))?;

    repo.write("src/lib.rs", "pub fn answer() -> u32 {\n    41 + 1\n}\n")?;
    repo.commit("Refactor", &format!("2020-{month:02}-{day:02}T10:00:00+00:00"))?;

    let latest = document(
        "Governance",
        &[("Roles and responsibilities", latest_rules), ("Decision making", added_rules)],
        index % 3 == 0,
    );
    repo.write("GOVERNANCE.md", &latest)?;
    repo.commit("Expand governance", &format!("{later}T11:00:00+00:00"))?;
    Ok(dir)
}

/// Writes `repos` planted repositories under `dir/repos`, a manifest and a
/// `govtrace.toml` pointing at both. Returns the configuration path.
pub fn write_planted_corpus(dir: &Path, repos: usize, seed: u64) -> io::Result<PathBuf> {
    let repo_root = dir.join("repos");
    let mut manifest = String::from("# planted-effect corpus\n");
    for index in 0..repos {
        let path = planted_repo(&repo_root, index, seed)?;
        let rel = path.strip_prefix(dir).unwrap_or(&path);
        manifest.push_str(&format!("{}\n", rel.display()));
    }
    fs::write(dir.join("manifest.txt"), manifest)?;
    let config = dir.join("govtrace.toml");
    fs::write(&config, format!("corpus = \"manifest.txt\"\nout = \"out\"\nseed = {seed}\n"))?;
    Ok(config)
}
