//! Run configuration: a TOML file naming the corpus and the plain-text
//! resource files, plus numeric parameters. Every resource is optional and
//! falls back to the defaults shipped with the tool.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use govtrace_core::cluster::ClusterParams;
use govtrace_core::metrics::{BootstrapConfig, RarefactionParams, DEFAULT_TAU};
use govtrace_core::statement::{ActionTypology, DeonticMap, Extractor, PolarityTable, RoleLexicon};
use govtrace_core::text::{parse_badge_hosts, Abbreviations, Normalizer};
use govtrace_core::{defaults, seed};

use crate::error::{Error, Result};
use crate::mine::PatternSet;

pub const DEFAULT_PATTERNS: &str = include_str!("../config/patterns.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subset {
    /// Only pairs whose snapshots fall on different calendar days.
    #[default]
    AcrossDay,
    All,
}

impl Subset {
    pub fn as_str(self) -> &'static str {
        match self {
            Subset::AcrossDay => "across-day",
            Subset::All => "all",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusteringConfig {
    pub theta: f64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig { theta: ClusterParams::default().theta }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RarefactionConfig {
    pub cap: usize,
    pub repeats: usize,
    pub tau: u64,
    pub with_replacement: bool,
}

impl Default for RarefactionConfig {
    fn default() -> Self {
        let p = RarefactionParams::default();
        RarefactionConfig { cap: p.cap, repeats: p.repeats, tau: DEFAULT_TAU, with_replacement: p.with_replacement }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BootstrapSection {
    pub b: usize,
    pub alpha: f64,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        let c = BootstrapConfig::default();
        BootstrapSection { b: c.b, alpha: c.alpha }
    }
}

/// Contents of the configuration file. Relative paths are resolved against
/// the directory holding the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Manifest (one repository path per line) or a directory of checkouts.
    pub corpus: PathBuf,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub subset: Subset,
    #[serde(default = "yes")]
    pub resolve_pronouns: bool,
    pub patterns: Option<PathBuf>,
    pub roles_lexicon: Option<PathBuf>,
    pub deontics_map: Option<PathBuf>,
    pub polarity_map: Option<PathBuf>,
    pub typology_map: Option<PathBuf>,
    pub badge_hosts: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    /// Sidecar `vectors.jsonl` replacing the built-in lexical embedding.
    pub vectors: Option<PathBuf>,
    #[serde(default)]
    pub clustering: ClusteringConfig,
    #[serde(default)]
    pub rarefaction: RarefactionConfig,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
}

fn default_out() -> PathBuf {
    PathBuf::from("govtrace-out")
}

fn yes() -> bool {
    true
}

/// Command line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub theta: Option<f64>,
    pub bootstrap_b: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(source: &str, base: &Path) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(source).map_err(|e| Error::config(e.to_string()))?;
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let source =
            fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_toml(&source, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.corpus);
        join(&mut self.out);
        for p in [
            &mut self.patterns,
            &mut self.roles_lexicon,
            &mut self.deontics_map,
            &mut self.polarity_map,
            &mut self.typology_map,
            &mut self.badge_hosts,
            &mut self.abbreviations,
            &mut self.vectors,
        ]
        .into_iter()
        .flatten()
        {
            join(p);
        }
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(out) = &overrides.out {
            self.out = out.clone();
        }
        if let Some(theta) = overrides.theta {
            self.clustering.theta = theta;
        }
        if let Some(b) = overrides.bootstrap_b {
            self.bootstrap.b = b;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let theta = self.clustering.theta;
        if !(theta > 0.0 && theta <= 2.0) {
            return Err(Error::config(format!("clustering.theta must be in (0, 2], got {theta}")));
        }
        if self.rarefaction.cap == 0 || self.rarefaction.repeats == 0 || self.rarefaction.tau == 0 {
            return Err(Error::config("rarefaction cap, repeats and tau must all be at least 1"));
        }
        if self.bootstrap.b == 0 || !(self.bootstrap.alpha > 0.0 && self.bootstrap.alpha < 1.0) {
            return Err(Error::config("bootstrap needs b >= 1 and 0 < alpha < 1"));
        }
        if !self.corpus.exists() {
            return Err(Error::config(format!("corpus {} does not exist", self.corpus.display())));
        }
        for (name, path) in self.resource_paths() {
            if let Some(path) = path {
                if !path.is_file() {
                    return Err(Error::config(format!("{name} file {} does not exist", path.display())));
                }
            }
        }
        Ok(())
    }

    fn resource_paths(&self) -> [(&'static str, Option<&PathBuf>); 8] {
        [
            ("patterns", self.patterns.as_ref()),
            ("roles_lexicon", self.roles_lexicon.as_ref()),
            ("deontics_map", self.deontics_map.as_ref()),
            ("polarity_map", self.polarity_map.as_ref()),
            ("typology_map", self.typology_map.as_ref()),
            ("badge_hosts", self.badge_hosts.as_ref()),
            ("abbreviations", self.abbreviations.as_ref()),
            ("vectors", self.vectors.as_ref()),
        ]
    }

    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams { theta: self.clustering.theta }
    }

    /// Rarefaction parameters for one feature; the seed is derived from the
    /// run seed and the feature name.
    pub fn rarefaction_params(&self, feature: &str) -> RarefactionParams {
        RarefactionParams {
            cap: self.rarefaction.cap,
            repeats: self.rarefaction.repeats,
            seed: seed::derive(self.seed, ["rarefaction", feature]),
            with_replacement: self.rarefaction.with_replacement,
        }
    }

    pub fn bootstrap_config(&self, feature: &str, statistic: &str) -> BootstrapConfig {
        BootstrapConfig {
            b: self.bootstrap.b,
            alpha: self.bootstrap.alpha,
            seed: seed::derive(self.seed, ["bootstrap", feature, statistic]),
        }
    }
}

/// A resource file's text plus where it came from.
#[derive(Debug, Clone)]
pub struct Resource {
    pub name: &'static str,
    pub origin: String,
    pub text: String,
}

impl Resource {
    fn load(name: &'static str, path: Option<&PathBuf>, builtin: &str) -> Result<Self> {
        match path {
            Some(path) => Ok(Resource {
                name,
                origin: path.display().to_string(),
                text: fs::read_to_string(path)
                    .map_err(|e| Error::config(format!("cannot read {name} {}: {e}", path.display())))?,
            }),
            None => Ok(Resource { name, origin: "builtin".into(), text: builtin.to_string() }),
        }
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }
}

/// Parsed resources shared read-only by every stage.
#[derive(Debug, Clone)]
pub struct Resources {
    pub patterns: PatternSet,
    pub normalizer: Normalizer,
    pub extractor: Extractor,
    pub files: Vec<Resource>,
}

impl Resources {
    pub fn load(config: &RunConfig) -> Result<Self> {
        let files = vec![
            Resource::load("patterns", config.patterns.as_ref(), DEFAULT_PATTERNS)?,
            Resource::load("roles_lexicon", config.roles_lexicon.as_ref(), defaults::ROLES_LEXICON)?,
            Resource::load("deontics_map", config.deontics_map.as_ref(), defaults::DEONTICS_MAP)?,
            Resource::load("polarity_map", config.polarity_map.as_ref(), defaults::POLARITY_MAP)?,
            Resource::load("typology_map", config.typology_map.as_ref(), defaults::TYPOLOGY_MAP)?,
            Resource::load("badge_hosts", config.badge_hosts.as_ref(), defaults::BADGE_HOSTS)?,
            Resource::load("abbreviations", config.abbreviations.as_ref(), defaults::ABBREVIATIONS)?,
        ];
        let text = |i: usize| files[i].text.as_str();
        let bad = |i: usize, e: &dyn std::fmt::Display| Error::config(format!("{} ({}): {e}", files[i].name, files[i].origin));
        let patterns = PatternSet::parse(text(0)).map_err(|e| bad(0, &e))?;
        let lexicon = RoleLexicon::parse(text(1)).map_err(|e| bad(1, &e))?;
        if lexicon.is_empty() {
            return Err(bad(1, &"role lexicon is empty"));
        }
        let deontics = DeonticMap::parse(text(2)).map_err(|e| bad(2, &e))?;
        let polarity = PolarityTable::parse(text(3)).map_err(|e| bad(3, &e))?;
        let typology = ActionTypology::parse(text(4)).map_err(|e| bad(4, &e))?;
        let normalizer = Normalizer::new(parse_badge_hosts(text(5)), Abbreviations::parse(text(6)));
        Ok(Resources {
            patterns,
            normalizer,
            extractor: Extractor::new(lexicon, deontics, polarity, typology),
            files,
        })
    }

    pub fn file(&self, name: &str) -> &Resource {
        self.files.iter().find(|r| r.name == name).expect("known resource name")
    }
}

/// A validated run: configuration, parsed resources and the repositories.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: RunConfig,
    pub resources: Resources,
    pub repos: Vec<RepoEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepoEntry {
    pub repo_id: String,
    pub path: PathBuf,
}

impl Run {
    pub fn prepare(mut config: RunConfig, overrides: &Overrides) -> Result<Self> {
        config.apply(overrides);
        config.validate()?;
        let resources = Resources::load(&config)?;
        let repos = read_corpus(&config.corpus)?;
        Ok(Run { config, resources, repos })
    }

    /// One-line summary of the parameters that shape the results, written at
    /// the top of every table and CSV.
    pub fn header(&self) -> String {
        let c = &self.config;
        let short = |name: &str| self.resources.file(name).sha256()[..12].to_string();
        format!(
            "govtrace {} seed={} subset={} theta={} tau={} cap={} repeats={} with_replacement={} B={} alpha={} \
             embedding={} typology={} polarity=[{}]",
            env!("CARGO_PKG_VERSION"),
            c.seed,
            c.subset.as_str(),
            c.clustering.theta,
            c.rarefaction.tau,
            c.rarefaction.cap,
            c.rarefaction.repeats,
            c.rarefaction.with_replacement,
            c.bootstrap.b,
            c.bootstrap.alpha,
            if c.vectors.is_some() { "imported" } else { "default-lexical" },
            short("typology_map"),
            self.resources.extractor.polarity().describe(),
        )
    }

    /// Hash of the effective configuration and the content of every
    /// resource file.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(&self.config).expect("config serializes"));
        for file in &self.resources.files {
            hasher.update(file.name.as_bytes());
            hasher.update(file.text.as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Reads the repository list. A directory lists its git subdirectories; a
/// file lists one path per line (`#` comments), relative to the file.
pub fn read_corpus(corpus: &Path) -> Result<Vec<RepoEntry>> {
    let mut paths: Vec<PathBuf> = Vec::new();
    if corpus.is_dir() {
        let entries = fs::read_dir(corpus).map_err(|e| Error::config(format!("{}: {e}", corpus.display())))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::config(e.to_string()))?.path();
            if path.join(".git").exists() || path.join("HEAD").is_file() {
                paths.push(path);
            }
        }
    } else {
        let text = fs::read_to_string(corpus).map_err(|e| Error::config(format!("{}: {e}", corpus.display())))?;
        let base = corpus.parent().unwrap_or(Path::new("."));
        for (line_no, line) in govtrace_core::config_lines(&text) {
            if line.contains("://") || line.starts_with("git@") {
                return Err(Error::config(format!(
                    "{}:{line_no}: remote repositories are not fetched; clone {line} locally and list the checkout",
                    corpus.display()
                )));
            }
            paths.push(base.join(line));
        }
    }
    if paths.is_empty() {
        return Err(Error::config(format!("corpus {} lists no repositories", corpus.display())));
    }
    let mut repos: Vec<RepoEntry> = paths
        .into_iter()
        .map(|path| {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let repo_id = name.strip_suffix(".git").unwrap_or(&name).to_string();
            RepoEntry { repo_id, path }
        })
        .collect();
    repos.sort_by(|a, b| a.repo_id.cmp(&b.repo_id));
    if let Some(w) = repos.windows(2).find(|w| w[0].repo_id == w[1].repo_id) {
        return Err(Error::config(format!("two repositories share the id {:?}", w[0].repo_id)));
    }
    if let Some(bad) = repos.iter().find(|r| r.repo_id.is_empty() || r.repo_id.starts_with('.')) {
        return Err(Error::config(format!("cannot derive a repository id from {}", bad.path.display())));
    }
    Ok(repos)
}
