//! `isingpath` command line.
//!
//! Reports go to standard output (or `--output`) as JSON or CSV; summaries go
//! to standard error. Exit status is 0 on success, 1 on domain errors and 2
//! on usage errors.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isingpath::anneal::ScheduleKind;
use isingpath::{EncodingScheme, GroupingMethod};

#[derive(Debug, Parser)]
#[command(name = "isingpath", version, about = "Minimum-cost synthesis pathways via QUBO and simulated annealing")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file whose keys set flags; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Leave wall-clock measurements out of reports.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random benchmark problem.
    #[command(args_override_self = true)]
    Generate(GenerateArgs),
    /// Check a pathway against a network.
    #[command(args_override_self = true)]
    Check(CheckArgs),
    /// Translate a network into a QUBO model file.
    #[command(args_override_self = true)]
    Translate(TranslateArgs),
    /// Anneal a QUBO model file.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Tune penalty strengths.
    #[command(args_override_self = true)]
    Tune(TuneArgs),
    /// Apply the inflow/outflow adjustment to a pathway.
    #[command(args_override_self = true)]
    Adjust(AdjustArgs),
    /// Exact minimum cost by enumeration.
    #[command(args_override_self = true)]
    Oracle(OracleArgs),
    /// Per-problem benchmark table.
    #[command(args_override_self = true)]
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Unary,
    Order,
    Log,
    #[value(alias = "onehot")]
    OneHot,
}

impl From<Encoding> for EncodingScheme {
    fn from(e: Encoding) -> Self {
        match e {
            Encoding::Unary => EncodingScheme::Unary,
            Encoding::Order => EncodingScheme::Order,
            Encoding::Log => EncodingScheme::Log,
            Encoding::OneHot => EncodingScheme::OneHot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grouping {
    Unified,
    Degree,
    Depth,
    Category,
}

impl From<Grouping> for GroupingMethod {
    fn from(g: Grouping) -> Self {
        match g {
            Grouping::Unified => GroupingMethod::Unified,
            Grouping::Degree => GroupingMethod::Degree,
            Grouping::Depth => GroupingMethod::Depth,
            Grouping::Category => GroupingMethod::Category,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Schedule {
    Geometric,
    #[value(alias = "inverse-log")]
    Invlog,
}

impl From<Schedule> for ScheduleKind {
    fn from(s: Schedule) -> Self {
        match s {
            Schedule::Geometric => ScheduleKind::Geometric,
            Schedule::Invlog => ScheduleKind::InverseLog,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    Tpe,
    Random,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Size profile: tiny, small or medium.
    #[arg(long, default_value = "small")]
    pub profile: String,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Network file.
    pub network: PathBuf,
    /// Pathway file; defaults to the pathway embedded in the network file.
    #[arg(long)]
    pub pathway: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PenaltyArgs {
    /// Uniform penalty strength; defaults to the cost bound.
    #[arg(long, conflicts_with = "lambda")]
    pub penalty: Option<String>,
    /// Penalties from a `tune` report.
    #[arg(long)]
    pub lambda: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    pub network: PathBuf,
    #[arg(long, value_enum, default_value = "unary")]
    pub encoding: Encoding,
    #[command(flatten)]
    pub penalties: PenaltyArgs,
}

#[derive(Debug, Args)]
pub struct AnnealArgs {
    #[arg(long, default_value_t = isingpath::anneal::DEFAULT_SWEEPS)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 200)]
    pub reads: usize,
    #[arg(long, value_enum, default_value = "geometric")]
    pub schedule: Schedule,
    #[arg(long)]
    pub beta_hot: Option<f64>,
    #[arg(long)]
    pub beta_cold: Option<f64>,
    /// Energy scale of the inverse-log schedule.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// QUBO model file.
    pub qubo: PathBuf,
    /// Network file; enables repair, costs and scores.
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Skip steepest descent and inflow/outflow adjustment.
    #[arg(long)]
    pub no_postprocess: bool,
    #[command(flatten)]
    pub anneal: AnnealArgs,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    pub network: PathBuf,
    #[arg(long, value_enum, default_value = "unified")]
    pub grouping: Grouping,
    #[arg(long, value_enum, default_value = "unary")]
    pub encoding: Encoding,
    #[arg(long, default_value_t = 300)]
    pub budget: usize,
    #[arg(long, default_value_t = 200)]
    pub samples_per_trial: usize,
    #[arg(long, value_enum, default_value = "tpe")]
    pub sampler: Sampler,
    /// Write the trial history here as CSV.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long, default_value_t = isingpath::anneal::DEFAULT_SWEEPS)]
    pub sweeps: usize,
}

#[derive(Debug, Args)]
pub struct AdjustArgs {
    pub network: PathBuf,
    /// Pathway file; defaults to the pathway embedded in the network file.
    #[arg(long)]
    pub pathway: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub network: PathBuf,
    #[arg(long, default_value_t = isingpath::bench::DEFAULT_ORACLE_LIMIT)]
    pub limit: u128,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Network files; when empty, problems are generated.
    pub networks: Vec<PathBuf>,
    #[arg(long, default_value = "tiny")]
    pub profile: String,
    /// Number of generated problems, seeded `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 5)]
    pub count: u64,
    #[arg(long, value_enum, default_value = "unary")]
    pub encoding: Encoding,
    /// Tune a unified penalty with this many trials; 0 uses the cost bound.
    #[arg(long, default_value_t = 0)]
    pub tune_budget: usize,
    #[arg(long, default_value_t = 50)]
    pub samples_per_trial: usize,
    /// Sweep counts tried for the time-to-solution.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000])]
    pub tau: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0f64, 1.2, 2.0])]
    pub rho: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Runs per sweep count.
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    #[arg(long, default_value_t = isingpath::bench::DEFAULT_ORACLE_LIMIT)]
    pub limit: u128,
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run(argv: Vec<OsString>) -> i32 {
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
