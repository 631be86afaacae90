//! Pure algorithms for tracing how written open-source governance changes.
//!
//! The crate is `no_std` (with `alloc`) and performs no I/O. It covers:
//!
//! - [`corpus`]: snapshot pairing, composite views and coverage statistics
//!   over commit histories supplied by the caller.
//! - [`text`]: markup normalization with reversible offsets, sentence
//!   segmentation and rule-based pronoun resolution.
//! - [`statement`]: extraction of institutional statements
//!   (role, deontic, action, object) and their canonicalization.
//! - [`cluster`]: statement rendering, lexical embedding, agglomerative
//!   clustering, class-based TF-IDF labels and per-snapshot distributions.
//! - [`metrics`]: entropy, Jensen-Shannon divergence, richness, rarefied
//!   richness change and the equal-weight repository bootstrap.
//!
//! The `govtrace` crate wires these into a git-backed command line pipeline.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cluster;
pub mod corpus;
pub mod metrics;
pub mod seed;
pub mod statement;
pub mod text;

/// Default configuration files shipped with the crate.
pub mod defaults {
    pub const ROLES_LEXICON: &str = include_str!("../config/roles.lexicon");
    pub const DEONTICS_MAP: &str = include_str!("../config/deontics.map");
    pub const POLARITY_MAP: &str = include_str!("../config/polarity.map");
    pub const TYPOLOGY_MAP: &str = include_str!("../config/typology.map");
    pub const ABBREVIATIONS: &str = include_str!("../config/abbreviations.list");
    pub const BADGE_HOSTS: &str = include_str!("../config/badge_hosts.list");
}

/// Iterates the meaningful lines of a plain-text config file: `#` starts a
/// comment, blank lines are skipped, surrounding whitespace is trimmed.
pub fn config_lines(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source.lines().enumerate().filter_map(|(idx, line)| {
        let body = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let body = body.trim();
        (!body.is_empty()).then_some((idx + 1, body))
    })
}
