//! `biwave`: spectra, eigenfunctions, transform demos and the check suite.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or validation error.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod output;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::Run;

#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError(format!("{}: {e}", path.display()))
    }
}

impl From<biwave::Error> for CliError {
    fn from(e: biwave::Error) -> Self {
        CliError(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BIWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("BIWAVE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size the thread pool: {e}")))
}

fn run(args: &[String], cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let mut run = Run::new(cli.command.name(), args);
    let ok = match &cli.command {
        Command::Spectrum(a) => commands::spectrum_cmd(a, &mut run).map(|_| true)?,
        Command::Wavefunction(a) => commands::wavefunction_cmd(a, &mut run).map(|_| true)?,
        Command::Verify(a) => commands::verify_cmd(a, &mut run)?,
        Command::TransformDemo(a) => commands::demo_cmd(a, &mut run).map(|_| true)?,
    };
    run.finish()?;
    Ok(ok)
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&args, cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
