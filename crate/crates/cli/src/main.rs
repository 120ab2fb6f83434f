//! `adtext`: run the job-ad extraction pipeline from a config file.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "adtext", version, about = "Extract taxonomy-coded features from job ads")]
pub struct Cli {
    /// Run configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Abort on the first rejected corpus row.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Data-parallel width.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Seed for sampling; overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate and normalize the corpus; emit records, sentences and readability.
    Ingest,
    /// Run one extractor over the corpus.
    Extract {
        #[arg(value_enum)]
        what: Extractor,
    },
    /// Build the monthly active-jobs index and grouped statistics.
    Aggregate,
    /// Simulate precision/recall over a binned accuracy table.
    Simulate(SimulateArgs),
    /// Inter-rater agreement, kappa and strict/lenient accuracy.
    Kappa(KappaArgs),
    /// Stratified audit sample of scored results.
    Sample(SampleArgs),
    /// Ingest, every configured extractor, aggregate and simulate.
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Extractor {
    Skills,
    Tasks,
    Titles,
    Firms,
    Wages,
    Tags,
    Dict,
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    /// Bin table CSV (bin_label, freq, accuracy columns).
    #[arg(long)]
    pub bins: Option<PathBuf>,
    /// Accuracy column to use.
    #[arg(long)]
    pub accuracy: Option<String>,
    #[arg(long)]
    pub n_flagged: Option<f64>,
    #[arg(long)]
    pub n_unflagged: Option<f64>,
    #[arg(long)]
    pub stage1_fnr: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug)]
pub struct KappaArgs {
    /// CSV with one row per item and one column per rater.
    #[arg(long)]
    pub ratings: PathBuf,
    /// Rater columns; kappa is reported for every pair.
    #[arg(long, value_delimiter = ',', required = true)]
    pub raters: Vec<String>,
    /// Column that strict/lenient accuracy is measured against.
    #[arg(long)]
    pub reference: Option<String>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// JSONL rows carrying a numeric `score` field.
    #[arg(long)]
    pub scores: PathBuf,
    /// Bin edges; defaults to 0.80..1.00 in steps of 0.01.
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub per_bin: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| commands::dispatch(&cli)) {
        Ok(commands::Status::Clean) => ExitCode::SUCCESS,
        Ok(commands::Status::Partial) => {
            eprintln!("completed with errors; see errors_*.json in the output directory");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
