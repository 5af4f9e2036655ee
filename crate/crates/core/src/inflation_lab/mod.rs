//! Experiment runner: configs, sweeps and reports.

pub mod approx;
pub mod config;
pub mod feasibility;
pub mod gamma;
pub mod inflate;
pub mod report;

pub use approx::{approximation_error, homogeneous_norm_finite, line_norm, periodization_modes, run_approximation, run_periodization};
pub use config::{DataKind, EvolutionMethod, Experiment, ExperimentConfig, ProfileConfig};
pub use feasibility::{condition_slacks, feasibility_scan, feasibility_score, run_feasibility, schedule_triple, ScanResult, Triple};
pub use gamma::{gamma_discrepancy, measure_constants, monomial_lambda, run_gamma, GammaCount};
pub use inflate::{duhamel_budget, picard_budget, run_inflation};
pub use report::{emit_report, linear_fit, render, version_string, Fit, Format, InflationReport, ReportRow, CSV_COLUMNS};

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Maps `f(index, value)` over the sweep in parallel; results keep sweep order.
pub fn sweep_map<T: Send>(values: &[f64], f: impl Fn(usize, f64) -> T + Sync + Send) -> Vec<T> {
    values.par_iter().enumerate().map(|(i, &v)| f(i, v)).collect()
}

pub fn timed(record: bool, f: impl FnOnce() -> Result<ReportRow>) -> Result<ReportRow> {
    let start = std::time::Instant::now();
    let mut row = f()?;
    if record {
        row.wall_ms = start.elapsed().as_millis() as u64;
    }
    Ok(row)
}

pub fn run_config(cfg: &ExperimentConfig) -> Result<InflationReport> {
    match cfg.experiment {
        Experiment::Inflate => run_inflation(cfg),
        Experiment::Approx => run_approximation(cfg),
        Experiment::Periodize => run_periodization(cfg),
        Experiment::Gamma => run_gamma(cfg),
        Experiment::Feasibility => run_feasibility(cfg),
    }
}

/// Runs the experiment on a pool of `threads` workers (rayon's default when None).
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<InflationReport> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        if k == 0 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        b = b.num_threads(k);
    }
    let pool = b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_config(cfg))
}
