//! The `infoplan` command-line runner.
//!
//! Each subcommand builds a [`report::Report`] of named tables and writes it
//! as CSV or JSON. Reports echo the effective settings and seed, so the same
//! settings reproduce the same bytes.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::time::Instant;

use clap::Parser;

use crate::args::{echo, Cli, Command};
use crate::error::{exit, CliError};
use crate::report::{Report, Table};

/// Runs the CLI on `argv` (program name first) and returns the exit status.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match args::merge_config(argv) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => match report.write(cli.format, cli.out.as_deref()) {
            Ok(_) => exit::OK,
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    eprintln!("infoplan: {e}");
    e.exit_code()
}

/// Builds the report for a parsed command line.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let started = Instant::now();
    let (settings, tables) = match &cli.command {
        Command::Weighing(a) => (echo(a), commands::weighing(a)?),
        Command::Guess(a) => (echo(a), commands::guess(a)?),
        Command::SubmarineExact(a) => (echo(a), commands::submarine_exact(a)?),
        Command::SubmarineRollout(a) => (echo(a), commands::submarine_rollout(a)?),
        Command::GpTransect(a) => (echo(a), commands::gp_transect(a, cli.seed)?),
    };
    let format = match cli.format {
        report::Format::Csv => "csv",
        report::Format::Json => "json",
    };
    let mut report = Report::new(
        cli.command.name(),
        cli.seed,
        commands::echo_common(cli.seed, format, settings),
    );
    report.tables = tables;
    if cli.timings {
        let mut t = Table::new("timings", &["phase", "wall_ms"]);
        t.push(vec!["total".into(), (started.elapsed().as_secs_f64() * 1e3).into()]);
        report.tables.push(t);
    }
    Ok(report)
}
