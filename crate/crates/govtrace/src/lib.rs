//! Git-backed pipeline around `govtrace-core`: mine governance snapshots,
//! normalize and parse them into institutional statements, cluster, compute
//! paired change metrics and emit report tables.
//!
//! Every stage writes a line-delimited JSON or CSV artifact into the output
//! directory, so any stage can be rerun or replaced on its own.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod fixture;
pub mod git;
pub mod mine;
pub mod pipeline;
pub mod report;

use std::fs;
use std::path::Path;

pub use config::{Overrides, Run, RunConfig};
pub use error::{Error, Result, Stage};

/// Runs one stage. `stage_input` replaces the artifact the stage would
/// otherwise read from the output directory.
pub fn run_stage(run: &Run, stage: Stage, stage_input: Option<&Path>) -> Result<()> {
    let out = &run.config.out;
    fs::create_dir_all(out).map_err(|e| Error::io(stage, out, e))?;
    log::info!("stage {stage} starting");
    match stage {
        Stage::Mine => {
            if stage_input.is_some() {
                return Err(Error::config("the mine stage reads the configured corpus; --stage-input does not apply"));
            }
            pipeline::mine(run, out)
        }
        Stage::Normalize => pipeline::normalize(run, out, stage_input),
        Stage::Parse => pipeline::parse(run, out, stage_input),
        Stage::Cluster => pipeline::cluster_stage(run, out, stage_input),
        Stage::Metrics => pipeline::metrics(run, out, stage_input),
        Stage::Report => report::report(run, out, stage_input),
    }
}

/// Runs every stage in order, then writes the run manifest.
pub fn run_all(run: &Run) -> Result<()> {
    let started = chrono::Utc::now();
    for stage in Stage::ALL {
        run_stage(run, stage, None)?;
    }
    report::write_manifest(run, &run.config.out, &Stage::ALL, started)
}
