//! Command-line front end for the direct-measurement toolkit. Each
//! subcommand resolves its flags into a config, stamps every artifact with
//! `{tool, version, seed, config hash}`, and writes deterministically so a
//! rerun with the same inputs reproduces the same bytes. Failures print one
//! JSON object on standard error and exit nonzero; exit code 0 means every
//! requested artifact was written.

mod args;
mod commands;
mod output;

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if err.kind() == ErrorKind::DisplayHelp
                || err.kind() == ErrorKind::DisplayVersion =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            emit_error("usage", &err.to_string());
            return ExitCode::from(2);
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            emit_error(err.kind(), &err.to_string());
            ExitCode::FAILURE
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}
