//! `foilbench`: build event-level foil benchmarks from scene graphs and score retrieval gaps.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "foilbench", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Pipeline config (JSON). Flags below override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Global seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    pub force: bool,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate scene graphs, writing them as graphs.jsonl.
    Ingest,
    /// Enumerate manipulation sites and sample foils, writing records.jsonl.
    Probe {
        /// Graphs from `ingest`; defaults to ingesting the config's input glob.
        #[arg(long)]
        graphs: Option<PathBuf>,
    },
    /// Render records into caption pairs (pairs.jsonl), decorating them if configured.
    Render {
        #[arg(long)]
        records: PathBuf,
    },
    /// Write benchmark.jsonl and its manifest.
    Emit {
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Build retrieval pools from a benchmark, or score them against external matrices.
    Eval(commands::EvalArgs),
    /// Summarize gap files into a report CSV and a scatter CSV.
    GapReport {
        /// Files written by `eval`.
        #[arg(long = "gaps", required = true, num_args = 1..)]
        gaps: Vec<PathBuf>,
        /// Model label for the scatter file.
        #[arg(long, default_value = "model")]
        model: String,
    },
    /// Evaluate the hard-negative loss and its gradient check on a literal batch.
    LossSelftest {
        /// JSON batch: {"tau", "beta", "V", "T", "G"}.
        #[arg(long)]
        input: PathBuf,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
    },
    /// Run ingest, probe, render and emit end to end.
    Run,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = foilbench_core::Exec::from_jobs(cli.global.jobs);
    let ctx = commands::Context { global: cli.global, exec };
    let result = match cli.command {
        Command::Ingest => commands::ingest(&ctx),
        Command::Probe { graphs } => commands::probe(&ctx, graphs.as_deref()),
        Command::Render { records } => commands::render(&ctx, &records),
        Command::Emit { pairs } => commands::emit(&ctx, &pairs),
        Command::Eval(args) => commands::eval(&ctx, &args),
        Command::GapReport { gaps, model } => commands::gap_report(&ctx, &gaps, &model),
        Command::LossSelftest { input, h } => commands::loss_selftest(&input, h),
        Command::Run => commands::run(&ctx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
