use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Mine,
    Normalize,
    Parse,
    Cluster,
    Metrics,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Mine, Stage::Normalize, Stage::Parse, Stage::Cluster, Stage::Metrics, Stage::Report];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Mine => "mine",
            Stage::Normalize => "normalize",
            Stage::Parse => "parse",
            Stage::Cluster => "cluster",
            Stage::Metrics => "metrics",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration or inputs detected before any stage ran.
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("stage {stage} failed{}: {message}", repo_suffix(.repos))]
    Stage { stage: Stage, repos: Vec<String>, message: String },
}

fn repo_suffix(repos: &[String]) -> String {
    if repos.is_empty() {
        String::new()
    } else {
        format!(" for {}", repos.join(", "))
    }
}

impl Error {
    pub fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    pub fn stage(stage: Stage, message: impl fmt::Display) -> Self {
        Error::Stage { stage, repos: Vec::new(), message: message.to_string() }
    }

    pub fn stage_repos(stage: Stage, repos: Vec<String>, message: impl fmt::Display) -> Self {
        Error::Stage { stage, repos, message: message.to_string() }
    }

    pub fn io(stage: Stage, path: &std::path::Path, err: impl fmt::Display) -> Self {
        Error::stage(stage, format!("{}: {err}", path.display()))
    }

    /// Process exit code: 2 for configuration errors, 3 for stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Stage { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure reading a repository with git.
#[derive(Debug, Error)]
pub enum GitError {
    #[error("{repo}: cannot run git: {source}")]
    Spawn { repo: String, source: std::io::Error },
    #[error("{repo}: not a readable git repository at {path}: {detail}")]
    NotARepository { repo: String, path: PathBuf, detail: String },
    #[error("{repo}: `git {command}` failed: {detail}")]
    Command { repo: String, command: String, detail: String },
    #[error("{repo}: unreadable commits {}: {detail}", .commits.join(", "))]
    Corrupt { repo: String, commits: Vec<String>, detail: String },
}

impl GitError {
    pub fn repo(&self) -> &str {
        match self {
            GitError::Spawn { repo, .. }
            | GitError::NotARepository { repo, .. }
            | GitError::Command { repo, .. }
            | GitError::Corrupt { repo, .. } => repo,
        }
    }
}
