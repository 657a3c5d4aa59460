//! Command-line front end: model tabulation, ensemble simulation, spectrum
//! estimation, and the self-check suite.
//!
//! Exit codes: 0 success, 1 failed verification checks, 2 invalid arguments
//! or inconsistent inputs, 3 I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isospec::Error;

mod checks;
mod cmd_estimate;
mod cmd_models;
mod cmd_simulate;
mod cmd_verify;
mod report;

#[derive(Parser)]
#[command(
    name = "isospec",
    version,
    about = "Angular spectra for isotropic random fields on the sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a covariance model: power spectrum and covariance curve.
    Models {
        /// JSON model descriptor.
        #[arg(long)]
        config: PathBuf,
        /// Largest degree to tabulate.
        #[arg(long, default_value_t = 32)]
        lmax: u32,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a replicate ensemble and write it with a checksummed manifest.
    Simulate {
        /// JSON simulation config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores; env ISOSPEC_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Estimate spectra from a simulated ensemble.
    Estimate {
        /// Ensemble directory holding manifest.json.
        ensemble: PathBuf,
        /// Comma-separated polyspectrum orders, e.g. "3,4".
        orders: Option<String>,
        /// Band limit for polyspectrum tables (default: the ensemble's).
        #[arg(long)]
        lmax: Option<u32>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores; env ISOSPEC_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the cross-module identity suite and write a check report.
    Verify {
        /// Suite size: quick or full.
        #[arg(long, default_value = "quick")]
        level: String,
        /// Output directory for the report.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores; env ISOSPEC_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
}

/// Apply --threads, falling back to ISOSPEC_THREADS. Garbage values are
/// rejected rather than silently ignored.
fn configure_threads(flag: Option<usize>) -> isospec::Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("ISOSPEC_THREADS") {
            Ok(v) => Some(v.parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "ISOSPEC_THREADS must be a positive integer, got {v:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "thread count must be positive".to_string(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> isospec::Result<u8> {
    match cli.command {
        Command::Models { config, lmax, out } => {
            cmd_models::run(&config, lmax, &out)?;
            Ok(0)
        }
        Command::Simulate {
            config,
            out,
            seed,
            threads,
        } => {
            configure_threads(threads)?;
            cmd_simulate::run(&config, &out, seed)?;
            Ok(0)
        }
        Command::Estimate {
            ensemble,
            orders,
            lmax,
            out,
            threads,
        } => {
            configure_threads(threads)?;
            cmd_estimate::run(&ensemble, orders.as_deref(), lmax, &out)?;
            Ok(0)
        }
        Command::Verify {
            level,
            out,
            threads,
        } => {
            configure_threads(threads)?;
            cmd_verify::run(&level, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) => 3,
                _ => 2,
            })
        }
    }
}
