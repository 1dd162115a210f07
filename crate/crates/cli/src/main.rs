//! `pellip`: runs one experiment described by a JSON config.
//!
//! Exit status: 0 success, 2 schema or input error, 3 a numerical verdict
//! failed, 4 a verdict was inconclusive, 1 anything else.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pellip_core::exec::{configure_threads, Exec};

use crate::error::CliError;
use crate::run::{run_config, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "pellip", version, about = "Reproducible p-ellipticity experiments")]
struct Args {
    /// JSON experiment config.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the seed in the config (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_path` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, env = "PELLIP_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pellip: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(args: &Args) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Read {
        path: args.config.clone(),
        source,
    })?;
    let exec = match args.threads {
        Some(0) => return Err(CliError::Schema("--threads must be positive".into())),
        Some(1) => Exec::Sequential,
        Some(n) => {
            configure_threads(n);
            Exec::Parallel
        }
        None => Exec::Parallel,
    };
    let record = run_config(
        &text,
        &RunOptions {
            seed: args.seed,
            out: args.out.as_deref(),
            exec,
            verbose: args.verbose,
        },
    )?;
    if args.verbose {
        for (name, verdict) in &record.verdicts {
            eprintln!("[pellip] {name}: {verdict}");
        }
        eprintln!("[pellip] {} files, {:.3} s", record.files.len(), record.wall_time_seconds);
    }
    Ok(record.exit_code)
}
