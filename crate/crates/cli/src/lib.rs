//! Command-line front end: scenario files, queries and reports.

pub mod error;
pub mod exec;
pub mod query;
pub mod report;
pub mod scenario;

pub use error::{CliError, Result};
pub use exec::run;
pub use query::{parse_query_line, Query};
pub use report::{Outcome, QueryResult, Report};
pub use scenario::Scenario;

/// Runs every query of a scenario in order.
pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    let results = scenario
        .queries
        .iter()
        .map(|entry| {
            let context = format!("query on line {}", entry.line);
            let outcome = run(scenario, &entry.query, &context)?;
            Ok(QueryResult {
                query: entry.text.clone(),
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report { results })
}

/// `true` unless the report contains a failing self-test.
pub fn report_passed(report: &Report) -> bool {
    report.results.iter().all(|r| match &r.outcome {
        Outcome::Selftest { report } => report.passed(),
        _ => true,
    })
}
