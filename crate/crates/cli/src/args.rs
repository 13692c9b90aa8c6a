use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tailind::config::Count;

use crate::help::MAN_PAGE;

#[derive(Debug, Parser)]
#[command(
    name = "tailind",
    version,
    about = "Monte Carlo laboratory for level exceedences of many dependent t-statistics",
    after_long_help = MAN_PAGE
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dependence constants, threshold regime and error-bound shape.
    Calibrate(RunArgs),
    /// Monte Carlo single and pairwise tail probabilities of R.
    Tails(RunArgs),
    /// Block hit probabilities, dependent vs independent, and the count coupling bound.
    Coupling(RunArgs),
    /// Per-replicate exceedence clusters and block counts at a level.
    Cluster(RunArgs),
    /// Realized error rates of BH, step-down FWER and single-threshold rules.
    Mtc(RunArgs),
    /// Exceedence probabilities and error bounds for a grid of test counts.
    PaperTable(RunArgs),
    /// Check a configuration against the model's regime constraints.
    Validate(RunArgs),
    /// Re-run a manifest and verify every output digest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn count(s: &str) -> Result<u64, String> {
    s.parse::<Count>().map(|c| c.0)
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Configuration file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Number of tests (rows).
    #[arg(long, value_parser = count)]
    pub p: Option<u64>,
    /// Group size (columns).
    #[arg(long, value_parser = count)]
    pub n: Option<u64>,
    /// Dependence range κ.
    #[arg(long, value_parser = count)]
    pub kappa: Option<u64>,
    /// Largest lag correlation; also the flat correlation of gaussian-kdep.
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// iid | gaussian-kdep | moving-average.
    #[arg(long)]
    pub model: Option<String>,
    /// standard-normal | standardized-pareto | standardized-rademacher | two-point-with-atom.
    #[arg(long)]
    pub law: Option<String>,
    /// Slack η of the threshold regime.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Explicit level t (for tails and coupling: the R-level s).
    #[arg(long)]
    pub level: Option<f64>,
    /// Monte Carlo replicates.
    #[arg(long, value_parser = count)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: TAILIND_JOBS, else all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Set any configuration key, e.g. `--set mtc.q=0.05`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Where to write the re-run outputs (default: `replay/` next to the manifest).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}
