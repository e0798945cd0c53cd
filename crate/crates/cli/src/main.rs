//! `eprkit` command-line front end.
//!
//! Exit codes: 0 on success (a violated inequality or an infeasible table is
//! a result, not a failure), 64 for bad arguments, 65 for unreadable or
//! inconsistent data files, 1 when `verify` finds a mismatch.

mod args;
mod commands;
mod error;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{Context, Outcome};
use error::{CliError, CliResult, EXIT_USAGE};

fn run(cli: Cli) -> CliResult<()> {
    let ctx = Context {
        format: cli.format,
        radians: cli.radians,
    };
    let outcome: Outcome = match &cli.command {
        Command::Dist(a) => commands::dist(&ctx, a)?,
        Command::Ineq(a) => commands::ineq(&ctx, a)?,
        Command::Scan(a) => commands::scan(&ctx, a)?,
        Command::Joint3(a) => commands::joint3(&ctx, a)?,
        Command::Joint4(a) => commands::joint4(&ctx, a)?,
        Command::Simulate(a) => commands::simulate(&ctx, a)?,
        Command::Info(a) => commands::info(&ctx, a)?,
        Command::Verify(a) => commands::verify(&ctx, a)?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.text),
    }
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("eprkit: {e}");
        std::process::exit(e.exit_code());
    }
}
