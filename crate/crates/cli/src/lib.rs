//! Lab runner for matrix-valued Riesz bases and frames: JSON-configured
//! experiments, the counterexample suite, randomized property trials and
//! parameter sweeps.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod properties;

use std::path::Path;

use mvframe_core::counterexamples::{self, CounterexampleSuite};
use serde::Serialize;

pub use config::{Construction, ExperimentConfig, Validated};
pub use error::CliError;
pub use experiment::{run_experiment, Outcome, RunReport};

/// Writes `<prefix>.report.json`, `<prefix>.timings.json` and, for sweeps,
/// `<prefix>.table.csv`.
pub fn write_outcome(prefix: &Path, outcome: &Outcome) -> Result<(), CliError> {
    output::write_json(&output::with_suffix(prefix, "report.json"), &outcome.report)?;
    output::write_json(&output::with_suffix(prefix, "timings.json"), &outcome.timings)?;
    if let Some(table) = &outcome.report.table {
        output::write_table(&output::with_suffix(prefix, "table.csv"), table)?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRun {
    pub passed: bool,
    pub suites: Vec<CounterexampleSuite>,
}

/// The counterexample suite on `L2(Z_n, C^{2x2})` for each order `n`.
pub fn run_counterexamples(orders: &[usize]) -> Result<CounterexampleRun, CliError> {
    let suites = orders.iter().map(|&n| counterexamples::run_suite(n)).collect::<Result<Vec<_>, _>>()?;
    Ok(CounterexampleRun { passed: suites.iter().all(CounterexampleSuite::all_hold), suites })
}
