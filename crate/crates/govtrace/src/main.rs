use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use govtrace::{fixture, report, run_all, run_stage, Error, Overrides, Run, RunConfig, Stage};

#[derive(Parser)]
#[command(name = "govtrace", version, about = "Trace how open-source governance documents change over time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, default_value = "govtrace.toml")]
    config: PathBuf,
    /// Global seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cosine distance threshold for clustering.
    #[arg(long)]
    theta: Option<f64>,
    /// Bootstrap replicates.
    #[arg(long)]
    bootstrap_b: Option<usize>,
    /// Replacement for the artifact the stage reads (replay or import).
    #[arg(long)]
    stage_input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Discover governance files and pair earliest/latest snapshots.
    Mine(Common),
    /// Normalize snapshot markup and segment sentences.
    Normalize(Common),
    /// Extract institutional statements (or import them).
    Parse(Common),
    /// Embed and cluster statements per repository and feature.
    Cluster(Common),
    /// Compute paired change metrics.
    Metrics(Common),
    /// Aggregate with the bootstrap and write tables and exports.
    Report(Common),
    /// Run every stage.
    Run(Common),
    /// Write the synthetic planted-effect corpus.
    Fixture {
        /// Directory to create the corpus in.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12)]
        repos: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn prepare(common: &Common) -> Result<Run, Error> {
    let config = RunConfig::load(&common.config)?;
    let overrides = Overrides {
        seed: common.seed,
        out: common.out.clone(),
        theta: common.theta,
        bootstrap_b: common.bootstrap_b,
    };
    Run::prepare(config, &overrides)
}

fn stage_command(common: &Common, stage: Stage) -> Result<(), Error> {
    let run = prepare(common)?;
    let started = chrono::Utc::now();
    run_stage(&run, stage, common.stage_input.as_deref())?;
    report::write_manifest(&run, &run.config.out, &[stage], started)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mine(c) => stage_command(c, Stage::Mine),
        Command::Normalize(c) => stage_command(c, Stage::Normalize),
        Command::Parse(c) => stage_command(c, Stage::Parse),
        Command::Cluster(c) => stage_command(c, Stage::Cluster),
        Command::Metrics(c) => stage_command(c, Stage::Metrics),
        Command::Report(c) => stage_command(c, Stage::Report),
        Command::Run(c) => {
            if c.stage_input.is_some() {
                Err(Error::config("--stage-input applies to single stages, not `run`"))
            } else {
                prepare(c).and_then(|run| run_all(&run))
            }
        }
        Command::Fixture { out, repos, seed } => fixture::write_planted_corpus(out, *repos, *seed)
            .map(|config| println!("{}", config.display()))
            .map_err(|e| Error::stage(Stage::Mine, e)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("govtrace: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
