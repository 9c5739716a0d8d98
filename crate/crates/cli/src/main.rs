mod commands;
mod error;
mod workdir;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

/// Fits hop-biased random walk models to clickstreams and ranks them by BIC.
#[derive(Debug, Parser)]
#[command(name = "hoprank", version)]
struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "HOPRANK_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn a graph and a request log into per-type transition counts.
    Ingest(commands::ingest::IngestArgs),
    /// Generate a graph and transitions from a planted model.
    Synth(commands::synth::SynthArgs),
    /// Fit every model on every navigation type of a work directory.
    Fit(commands::fit::FitArgs),
    /// Score the fitted models and pick a winner per navigation type.
    Rank(commands::rank::RankArgs),
    /// Merge the rankings of several work directories into one set of tables.
    Report(commands::report::ReportArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    match cli.command {
        Command::Ingest(args) => commands::ingest::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::Rank(args) => commands::rank::run(args),
        Command::Report(args) => commands::report::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
