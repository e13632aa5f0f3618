//! `ris-thz`: command-line front end for the RIS simulation toolkit.

mod args;
mod commands;
mod manifest;
mod reproduce;

use clap::Parser;
use std::process::ExitCode;

/// Outcome of a successful invocation.
pub enum Outcome {
    Ok,
    /// Ran to completion but at least one acceptance band was missed.
    AcceptanceFailed,
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ris_core::init_threads_from_env();
    match commands::run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AcceptanceFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
