mod args;
mod commands;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit status 2: bad flags or an unsupported combination.
const USAGE: u8 = 2;
/// Exit status 1: a comparison failed or a computation could not finish.
const FAILURE: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: FAILURE,
            message: message.into(),
        }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self::failure(format!("writing output: {e}"))
    }
}

impl From<runsdist::Error> for CliError {
    fn from(e: runsdist::Error) -> Self {
        use runsdist::Error::*;
        match e {
            InvalidParameter { name, reason } => Self::usage(format!("--{name}: {reason}")),
            Unsupported { .. } => Self::usage(format!("--engine: {e}")),
            Precondition(_) | OrderMismatch(_) | OrderExceedsTable { .. } => Self::usage(e.to_string()),
            _ => Self::failure(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Pmf(a) => commands::pmf(&a),
        Command::Moments(a) => commands::moments(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
