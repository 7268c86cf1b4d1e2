//! `readout-forge`: command-line front end for the readout-scheme toolkit.
//!
//! One subcommand per figure or table family: closed-form trajectories, SNR
//! and error curves, gain maps, operating-point recommendations, drive
//! envelopes, an integral-equation certificate, full master-equation runs,
//! and dressed-shift tables. Every run writes its data files plus a manifest
//! with the resolved parameters and SHA-256 checksums of the outputs.

mod args;
mod commands;
mod manifest;
mod resolve;
mod svg;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use crate::resolve::CliError;

fn main() {
    std::process::exit(run(std::env::args_os()));
}

/// Parses argv and runs exactly one subcommand. Exit codes: 0 on success,
/// 1 on domain errors, 2 on usage errors.
fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help and version requests to stdout, and parse
            // errors with the offending flag plus the usage grammar to
            // stderr.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
