//! The `qualmetrics` command line: argument parsing, configuration,
//! pipeline stages and the synthetic corpus generator.

pub mod commands;
pub mod config;
pub mod output;
pub mod synth;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_all, cmd_graph, cmd_indicators, cmd_ingest, cmd_reports, cmd_stats, cmd_synth, cmd_tabulate, run_stages,
    Context, RunSummary, Stage,
};
pub use config::{Overrides, RunConfig};
pub use output::{Header, OutputDir, METADATA_FILE};
pub use synth::{synthesize, DisciplineProfile, SynthParams};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qualmetrics", version, about = "Analytics over research qualification application corpora")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Corpus file (JSONL or CSV).
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Threshold table CSV (discipline,role,t1,t2,t3).
    #[arg(long, global = true)]
    pub thresholds: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed; falls back to EVAL_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Reports sampled per group for pairwise distances.
    #[arg(long, global = true)]
    pub sample_size: Option<usize>,
    /// Year indicators and ages are computed at (default: from the corpus).
    #[arg(long, global = true)]
    pub observation_year: Option<i32>,
    /// Confidence level of intervals.
    #[arg(long, global = true)]
    pub level: Option<f64>,
    /// Bootstrap replicates.
    #[arg(long, global = true)]
    pub bootstrap: Option<usize>,
    /// Corpus format: jsonl or csv (default: from the file extension).
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            config: self.config.clone(),
            corpus: self.corpus.clone(),
            thresholds: self.thresholds.clone(),
            out: self.out.clone(),
            seed: self.seed,
            sample_size: self.sample_size,
            observation_year: self.observation_year,
            level: self.level,
            bootstrap: self.bootstrap,
            format: self.format.clone(),
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Load, validate and deduplicate; write a data-quality report.
    Ingest,
    /// Per-application indicators and threshold verdicts.
    Indicators,
    /// Report length and similarity metrics with quadrant labels.
    Reports,
    /// Co-qualification matrix, graph exports, hubs and cliques.
    Graph,
    /// Rank correlation, probit fits and the application-count estimate.
    Stats,
    /// Descriptive tables.
    Tabulate,
    /// Generate a synthetic corpus and thresholds.
    Synth(SynthArgs),
    /// Every analysis stage into one output directory.
    All,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub applications: usize,
    #[arg(long, default_value_t = 24)]
    pub disciplines: usize,
    /// Probability that a report copies its discipline template.
    #[arg(long, default_value_t = 0.1)]
    pub cloning: f64,
    /// Mean report length in words.
    #[arg(long, default_value_t = 150)]
    pub report_words: usize,
    /// Age slope of the qualification probit.
    #[arg(long, default_value_t = 0.02)]
    pub beta: f64,
    /// Probability of applying in further disciplines.
    #[arg(long, default_value_t = 0.3)]
    pub overlap: f64,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        match e {
            Error::Config(_) | Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        }
    }
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> i32 {
    let config = match RunConfig::resolve(&cli.common.overrides(), env_seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Ingest => cmd_ingest(&config),
        Command::Indicators => cmd_indicators(&config),
        Command::Reports => cmd_reports(&config),
        Command::Graph => cmd_graph(&config),
        Command::Stats => cmd_stats(&config),
        Command::Tabulate => cmd_tabulate(&config),
        Command::All => cmd_all(&config),
        Command::Synth(a) => {
            let params = SynthParams {
                applications: a.applications,
                seed: config.seed,
                disciplines: a.disciplines,
                cloning: a.cloning,
                report_words: a.report_words,
                beta: a.beta,
                overlap: a.overlap,
                observation_year: config.observation_year,
                profiles: Vec::new(),
            };
            cmd_synth(&config, &params)
        }
    };
    match result {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", config.output_dir.join(f).display());
            }
            if summary.rejected > 0 {
                eprintln!("{} record(s) rejected; see ingest/rejects.csv", summary.rejected);
                EXIT_VALIDATION
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, std::env::var(config::SEED_ENV).ok().as_deref()),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
