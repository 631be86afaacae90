//! Thin wrapper over the `git` command line. Works on checkouts and bare
//! repositories alike; nothing is ever written to the repository.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::DateTime;

use govtrace_core::corpus::CommitTouch;

use crate::error::GitError;

#[derive(Debug, Clone)]
pub struct GitRepo {
    repo_id: String,
    root: PathBuf,
}

impl GitRepo {
    pub fn open(repo_id: &str, root: &Path) -> Result<Self, GitError> {
        let repo = GitRepo { repo_id: repo_id.to_string(), root: root.to_path_buf() };
        repo.run(&["rev-parse", "--git-dir"]).map_err(|err| match err {
            GitError::Command { detail, .. } => {
                GitError::NotARepository { repo: repo_id.to_string(), path: root.to_path_buf(), detail }
            }
            other => other,
        })?;
        Ok(repo)
    }

    pub fn repo_id(&self) -> &str {
        &self.repo_id
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>, GitError> {
        let output = Command::new("git")
            .arg("-C")
            .arg(&self.root)
            .args(["-c", "core.quotePath=false", "--no-pager"])
            .args(args)
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env_remove("GIT_DIR")
            .env_remove("GIT_WORK_TREE")
            .output()
            .map_err(|source| GitError::Spawn { repo: self.repo_id.clone(), source })?;
        if !output.status.success() {
            return Err(GitError::Command {
                repo: self.repo_id.clone(),
                command: args.join(" "),
                detail: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        Ok(output.stdout)
    }

    /// `HEAD`'s commit id, or `None` for a repository without commits.
    pub fn head(&self) -> Result<Option<String>, GitError> {
        match self.run(&["rev-parse", "--verify", "--quiet", "HEAD^{commit}"]) {
            Ok(out) => Ok(Some(String::from_utf8_lossy(&out).trim().to_string())),
            Err(GitError::Command { .. }) => Ok(None),
            Err(err) => Err(err),
        }
    }

    /// Every root-level path that appears anywhere in `HEAD`'s history.
    /// Renames are treated as a deletion plus a creation.
    pub fn root_paths_in_history(&self) -> Result<BTreeSet<String>, GitError> {
        if self.head()?.is_none() {
            return Ok(BTreeSet::new());
        }
        let out = self.run(&["log", "--format=", "--name-only", "--no-renames", "-z", "HEAD"])?;
        Ok(out
            .split(|b| *b == 0)
            .map(|p| String::from_utf8_lossy(p).trim_start_matches('\n').to_string())
            .filter(|p| !p.is_empty() && !p.contains('/'))
            .collect())
    }

    /// Root-level file names in the tree of `commit`.
    pub fn root_files_at(&self, commit: &str) -> Result<BTreeSet<String>, GitError> {
        let out = self.run(&["ls-tree", "-z", "--name-only", commit])?;
        Ok(out
            .split(|b| *b == 0)
            .filter(|p| !p.is_empty())
            .map(|p| String::from_utf8_lossy(p).into_owned())
            .collect())
    }

    /// Content of `path` at `commit`, lossily decoded as UTF-8.
    pub fn read_file(&self, commit: &str, path: &str) -> Result<String, GitError> {
        let spec = format!("{commit}:{path}");
        match self.run(&["cat-file", "blob", &spec]) {
            Ok(bytes) => Ok(String::from_utf8_lossy(&bytes).into_owned()),
            Err(GitError::Command { detail, .. }) => {
                Err(GitError::Corrupt { repo: self.repo_id.clone(), commits: vec![commit.to_string()], detail })
            }
            Err(err) => Err(err),
        }
    }

    /// One touch per commit reachable from `HEAD` that modified any of
    /// `paths`, oldest first in log order. Line counts cover those paths only.
    pub fn touches(&self, paths: &[String]) -> Result<Vec<CommitTouch>, GitError> {
        if paths.is_empty() || self.head()?.is_none() {
            return Ok(Vec::new());
        }
        let mut args: Vec<String> = ["log", "--reverse", "--no-renames", "--numstat", "--format=%x1e%H %ct", "HEAD", "--"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        args.extend(paths.iter().map(|p| format!(":(literal){p}")));
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = self.run(&argv).map_err(|err| match err {
            GitError::Command { detail, .. } => GitError::Corrupt {
                repo: self.repo_id.clone(),
                commits: object_ids(&detail),
                detail,
            },
            other => other,
        })?;
        parse_log(&self.repo_id, &String::from_utf8_lossy(&out))
    }
}

/// Hex object ids mentioned in a git error message.
fn object_ids(message: &str) -> Vec<String> {
    let ids: BTreeSet<String> = message
        .split(|c: char| !c.is_ascii_hexdigit())
        .filter(|w| w.len() == 40 || w.len() == 64)
        .map(str::to_string)
        .collect();
    ids.into_iter().collect()
}

fn parse_log(repo_id: &str, log: &str) -> Result<Vec<CommitTouch>, GitError> {
    let mut touches = Vec::new();
    for record in log.split('\u{1e}').filter(|r| !r.trim().is_empty()) {
        let mut lines = record.lines();
        let header = lines.next().unwrap_or_default();
        let corrupt = |detail: String| GitError::Corrupt {
            repo: repo_id.to_string(),
            commits: vec![header.split(' ').next().unwrap_or_default().to_string()],
            detail,
        };
        let (commit_id, ts) = header.split_once(' ').ok_or_else(|| corrupt(format!("bad log header {header:?}")))?;
        let timestamp: i64 = ts.trim().parse().map_err(|_| corrupt(format!("bad timestamp {ts:?}")))?;
        let date = DateTime::from_timestamp(timestamp, 0)
            .ok_or_else(|| corrupt(format!("timestamp out of range: {timestamp}")))?
            .date_naive();
        let (mut additions, mut deletions) = (0u64, 0u64);
        for line in lines.filter(|l| !l.is_empty()) {
            let mut fields = line.splitn(3, '\t');
            // Binary files report "-" for both counts.
            additions += fields.next().and_then(|f| f.parse().ok()).unwrap_or(0);
            deletions += fields.next().and_then(|f| f.parse().ok()).unwrap_or(0);
        }
        touches.push(CommitTouch {
            repo_id: repo_id.to_string(),
            commit_id: commit_id.to_string(),
            timestamp,
            date,
            additions,
            deletions,
        });
    }
    Ok(touches)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numstat_log() {
        let log = "\u{1e}aaaa 1395792000\n\n2\t0\tGOVERNANCE.md\n\u{1e}bbbb 1395964800\n\n1\t3\tGOVERNANCE.md\n-\t-\tgovernance.txt\n";
        let touches = parse_log("r", log).unwrap();
        assert_eq!(touches.len(), 2);
        assert_eq!((touches[0].additions, touches[0].deletions), (2, 0));
        assert_eq!(touches[0].date.to_string(), "2014-03-26");
        assert_eq!((touches[1].additions, touches[1].deletions), (1, 3));
        assert_eq!(touches[1].date.to_string(), "2014-03-28");
    }

    #[test]
    fn bad_header_names_the_commit() {
        let err = parse_log("r", "\u{1e}cafe notanumber\n").unwrap_err();
        assert!(matches!(err, GitError::Corrupt { ref commits, .. } if commits == &["cafe"]));
    }

    #[test]
    fn extracts_object_ids() {
        let id = "0123456789abcdef0123456789abcdef01234567";
        assert_eq!(object_ids(&format!("error: Could not read {id}")), [id]);
    }
}
