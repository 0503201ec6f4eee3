//! `geodesy`: evaluate exact solutions, solve and evolve the two-Killing
//! vacuum models, and verify the harmonic-map identities.
//!
//! Exit codes: 0 success, 2 bad input or usage, 3 domain violation,
//! 4 divergence or instability, 5 a report check failed.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use geodesy_core::ErrorKind;

use args::{Cli, Command};
use output::ChecksFailed;

const EXIT_INPUT: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_DIVERGENCE: u8 = 4;
const EXIT_VERIFICATION: u8 = 5;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ChecksFailed>().is_some() {
        return EXIT_VERIFICATION;
    }
    match err.downcast_ref::<geodesy_core::Error>().map(geodesy_core::Error::kind) {
        Some(ErrorKind::Domain) => EXIT_DOMAIN,
        Some(ErrorKind::Divergence) => EXIT_DIVERGENCE,
        _ => EXIT_INPUT,
    }
}

fn threads_from_env() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("GEODESY_THREADS") else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            geodesy_core::set_threads(n);
            Ok(())
        }
        _ => anyhow::bail!("GEODESY_THREADS must be a positive integer, got {raw:?}"),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    threads_from_env()?;
    let global = cli.global;
    match cli.command {
        Command::Weyl(a) => commands::weyl(&global, a),
        Command::Solve(a) => commands::solve(&global, a),
        Command::Evolve(a) => commands::evolve(&global, a),
        Command::Verify(a) => commands::verify(&global, a),
        Command::Extend(a) => commands::extend(&global, a),
        Command::Report(a) => commands::report(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
