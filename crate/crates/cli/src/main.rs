//! `rabi2p`: scans, spectra, collapse studies and validation reports.
//!
//! Exit status: 0 on success, 1 when `validate` finds a failing check, 2 on a
//! configuration or runtime error.

mod config;
mod output;
mod run;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Cli, RunConfig};

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("RABI2P_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("RABI2P_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot configure the thread pool")?;
    Ok(())
}

fn main() -> ExitCode {
    let config = RunConfig::from_cli(Cli::parse());
    let outcome = configure_threads()
        .and_then(|_| config.validate())
        .and_then(|_| run::run(&config));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
