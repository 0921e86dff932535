//! `gridfreq` command-line front end.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 non-convergence
//! under `--strict`, 4 ingest failure, 5 VMD failure, 6 statistics failure.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{RunConfig, CONFIG_SCHEMA_VERSION};

use crate::pipeline::{PipelineError, Stage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_INGEST: i32 = 4;
pub const EXIT_VMD: i32 = 5;
pub const EXIT_STATS: i32 = 6;

/// Schema version stamped on every JSON output.
pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let code = match e.stage() {
            Stage::Config | Stage::Output => EXIT_INPUT,
            Stage::Ingest => EXIT_INGEST,
            Stage::Extraction => EXIT_VMD,
            Stage::Evaluation => EXIT_STATS,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gridfreq", version, about = "Regional grid frequency analysis")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print errors only.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a PMU series into modes; writes modes.csv and centers.json.
    Decompose(DecomposeArgs),
    /// Hourly IBR penetration per region.
    Penetration(BalanceArgs),
    /// Hourly net load per region and system-wide.
    Netload(BalanceArgs),
    /// Net-load ramps and their histograms.
    Ramps(RampsArgs),
    /// Curtailment breakdown by reason and hourly profile.
    Curtailment(CurtailmentArgs),
    /// Dispersion, histogram, autocorrelation or spectrum of a PMU series.
    Stats(StatsArgs),
    /// Seven-day window with the highest mean penetration.
    CriticalWeek(CriticalWeekArgs),
    /// Full regional frequency response evaluation.
    Framework(FrameworkArgs),
    /// Generate a synthetic input set.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PmuArgs {
    /// PMU CSV (`timestamp_ms,frequency_hz`).
    pub input: PathBuf,
    /// Declared sample rate in Hz.
    #[arg(long)]
    pub rate: Option<u32>,
    /// Longest gap run to interpolate, in samples.
    #[arg(long)]
    pub max_gap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VmdArgs {
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// `uniform`, `zero` or `random:<seed>`.
    #[arg(long)]
    pub init: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub pmu: PmuArgs,
    #[command(flatten)]
    pub vmd: VmdArgs,
    /// Exit 3 when the iteration limit is reached before convergence.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    /// Balance CSV; falls back to `balance` in the config.
    #[arg(long)]
    pub balance: Option<PathBuf>,
    /// The solar column already includes DER and there is no der_mw column.
    #[arg(long)]
    pub combined_solar: bool,
}

#[derive(Debug, Args)]
pub struct RampsArgs {
    #[command(flatten)]
    pub balance: BalanceArgs,
    /// Comma-separated horizons in hours.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    /// Histogram bin width in MW.
    #[arg(long)]
    pub bin_mw: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurtailmentArgs {
    /// Curtailment CSV; falls back to `curtailment` in the config.
    #[arg(long)]
    pub curtailment: Option<PathBuf>,
    /// Hour-of-day range `start-end`, end exclusive (default 8-11).
    #[arg(long)]
    pub hours: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Std,
    Hist,
    Acf,
    Spectrum,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub metric: Metric,
    #[command(flatten)]
    pub pmu: PmuArgs,
    /// Analyse the dynamic component (input minus the lowest VMD mode).
    #[arg(long)]
    pub dynamic: bool,
    /// Histogram bin width in Hz.
    #[arg(long)]
    pub bin: Option<f64>,
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// Minimum peak prominence for `spectrum`.
    #[arg(long, default_value_t = 0.0)]
    pub min_prominence: f64,
}

#[derive(Debug, Args)]
pub struct CriticalWeekArgs {
    #[command(flatten)]
    pub balance: BalanceArgs,
    #[arg(long)]
    pub region: Option<String>,
}

#[derive(Debug, Args)]
pub struct FrameworkArgs {
    /// Directory of `<SITE>.csv` PMU files.
    #[arg(long)]
    pub pmu_dir: Option<PathBuf>,
    #[arg(long)]
    pub balance: Option<PathBuf>,
    #[arg(long)]
    pub inertia: Option<PathBuf>,
    #[arg(long)]
    pub rate: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scenario TOML; defaults apply to omitted keys.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Override the scenario's PMU rate.
    #[arg(long)]
    pub rate: Option<u32>,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
