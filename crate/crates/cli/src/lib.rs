//! Experiment runner for `qmem-core`: configuration, the named experiments and result files.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig, Overrides};
pub use error::CliError;
pub use output::Report;

/// What a completed run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
    pub seconds: f64,
}

/// Runs one experiment and writes its files. Failed checks still write
/// everything and are returned as [`CliError::Invariant`] afterwards.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let start = Instant::now();
    let report = experiments::run_experiment(config)?;
    let seconds = start.elapsed().as_secs_f64();
    let files = output::emit(config, &report, seconds)?;
    let failed = report.failed();
    if !failed.is_empty() {
        let names: Vec<String> = failed
            .iter()
            .map(|c| format!("{} (got {})", c.name, c.value))
            .collect();
        return Err(CliError::Invariant(names.join("; ")));
    }
    Ok(RunOutcome {
        report,
        files,
        seconds,
    })
}
