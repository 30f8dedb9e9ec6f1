//! `hypercoverage` command-line driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or domain error,
//! 3 results written but some threshold censored in every replicate.

mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::config::RunConfig;

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CENSORED: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Core(hypercoverage::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Usage(_) | CliError::Core(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<hypercoverage::Error> for CliError {
    fn from(e: hypercoverage::Error) -> Self {
        CliError::Core(e)
    }
}

fn run(args: Vec<OsString>) -> Result<u8, CliError> {
    let args = match config::config_path(&args) {
        Some(path) => {
            let text = output::read_to_string(Path::new(&path))?;
            let cfg = RunConfig::parse(&text).map_err(|e| CliError::usage(format!("{path}: {e}")))?;
            config::merge_args(args, &cfg).map_err(CliError::Usage)?
        }
        None => args,
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return Ok(e.exit_code() as u8);
        }
    };
    commands::dispatch(cli.command)
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
