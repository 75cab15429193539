//! Batch front end for `tqd-core`: one report document per invocation.
//!
//! Exit status is 0 on success, 1 when a verification finds violations and 2
//! for input, layout or capability errors.

pub mod cli;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{run, Outcome};
pub use report::{render, SCHEMA};

#[derive(Debug)]
pub enum CliError {
    Core(tqd_core::Error),
    Io(String),
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Input(e) => write!(f, "input error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tqd_core::Error> for CliError {
    fn from(e: tqd_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Caps rayon's pool at `TQD_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TQD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("TQD_THREADS must be a positive integer, got '{raw}'")))?;
    if n == 0 {
        return Err(CliError::Input("TQD_THREADS must be at least 1".into()));
    }
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs the command and writes the report; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("tqd: {e}");
        return 2;
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("tqd: {e}");
            return 2;
        }
    };
    let text = match render(&outcome, &cli.output) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("tqd: {e}");
            return 2;
        }
    };
    let written = match &cli.output.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("tqd: io error: {e}");
        return 2;
    }
    if outcome.violations {
        1
    } else {
        0
    }
}
