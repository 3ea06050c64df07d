//! The `zc-evolve` command line: `evolve`, `eval`, `search` and `report`.
//!
//! Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage and
//! validation errors.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dataset::ViewLabel;
use crate::gp::Survival;
use crate::zoo::ReportFormat;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "zc-evolve", version, about = "Evolve and evaluate zero-cost NAS proxies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a proxy on the train split and report test tau.
    Evolve(EvolveArgs),
    /// Kendall tau of every expression in a file, per problem.
    Eval(EvalArgs),
    /// Aging Evolution over a tabular search space.
    Search(SearchArgs),
    /// Leaderboard of proxies across problems.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SurvivalArg {
    Truncation,
    Tournament,
}

impl From<SurvivalArg> for Survival {
    fn from(s: SurvivalArg) -> Self {
        match s {
            SurvivalArg::Truncation => Survival::Truncation,
            SurvivalArg::Tournament => Survival::Tournament,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ViewArg {
    Train,
    Test,
    Full,
}

impl From<ViewArg> for ViewLabel {
    fn from(v: ViewArg) -> Self {
        match v {
            ViewArg::Train => ViewLabel::Train,
            ViewArg::Test => ViewLabel::Test,
            ViewArg::Full => ViewLabel::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Md,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Md => ReportFormat::Markdown,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

/// Dataset selection shared by `evolve`, `eval` and `report`.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Train fraction of the per-problem split.
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    #[arg(long, default_value_t = 50)]
    pub gens: usize,
    #[arg(long, default_value_t = 0.6)]
    pub p_crossover: f64,
    #[arg(long, default_value_t = 0.15)]
    pub p_subtree: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_hoist: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_point: f64,
    #[arg(long, default_value_t = 6)]
    pub max_depth_init: usize,
    #[arg(long, value_enum, default_value_t = SurvivalArg::Truncation)]
    pub survival: SurvivalArg,
    /// Best expression file; the sidecar `<out>.json` and `run.jsonl` go
    /// next to it.
    #[arg(long, default_value = "best.expr")]
    pub out: PathBuf,
    /// Evaluation threads, or parallel runs when `--runs` > 1.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Independent runs with seeds `seed, seed+1, ...` on the same split.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// File with one s-expression per line.
    pub expr_file: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = ViewArg::Full)]
    pub view: ViewArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Md)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Space manifest (JSON).
    #[arg(long)]
    pub space: PathBuf,
    /// Registry or column name, or a file holding one s-expression.
    #[arg(long)]
    pub proxy: String,
    #[arg(long, default_value_t = 50)]
    pub pop: usize,
    #[arg(long, default_value_t = 10)]
    pub sample: usize,
    /// Total evaluations, including the initial population.
    #[arg(long, default_value_t = 2000)]
    pub cycles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-cycle JSON-lines log.
    #[arg(long, default_value = "search.jsonl")]
    pub log: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated proxy names; `all-baselines` expands to every
    /// feature column of the dataset.
    #[arg(long, default_value = "all-baselines")]
    pub proxies: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Md)]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value_t = ViewArg::Full)]
    pub view: ViewArg,
}

/// Run an already-parsed command, writing user-facing output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve(a) => commands::evolve(&a, out),
        Command::Eval(a) => commands::eval(&a, out),
        Command::Search(a) => commands::search(&a, out),
        Command::Report(a) => commands::report(&a, out),
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
