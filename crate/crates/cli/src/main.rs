use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use slopecert_cli::{
    report_passed, run, run_scenario, CliError, Query, QueryResult, Report, Scenario,
};

/// Exact slope-stability certificates for cyclic covers of surfaces.
///
/// With a scenario and no command, runs the scenario's [queries] section.
/// With a command, runs that single query against the scenario (if any).
#[derive(Debug, Parser)]
#[command(name = "slopecert", version)]
struct Cli {
    /// Scenario file declaring the surface, cover and bundles.
    #[arg(long, global = true, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Option<Query>,
}

/// The command as typed, minus the global flags.
fn command_text() -> String {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--json" | "--quiet" => {}
            "--scenario" => {
                args.next();
            }
            a if a.starts_with("--scenario=") => {}
            _ => out.push(arg),
        }
    }
    out.join(" ")
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let scenario = match &cli.scenario {
        Some(path) => Scenario::from_path(path)?,
        None => Scenario::default(),
    };
    match &cli.command {
        Some(query) => {
            let text = command_text();
            let outcome = run(&scenario, query, &text)?;
            Ok(Report {
                results: vec![QueryResult {
                    query: text,
                    outcome,
                }],
            })
        }
        None => run_scenario(&scenario),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.command.is_none() && cli.scenario.is_none() {
        let _ = Cli::command().print_help();
        return ExitCode::from(1);
    }
    match execute(&cli) {
        Ok(report) => {
            let passed = report_passed(&report);
            if !cli.quiet || !passed {
                let rendered = if cli.json {
                    report.to_json()
                } else {
                    report.to_string()
                };
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(rendered.as_bytes());
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {}", CliError::SelftestFailed);
                ExitCode::from(CliError::SelftestFailed.exit_code() as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
