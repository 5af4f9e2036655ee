//! Report rows, fitted exponents and CSV/JSON emission.

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const CSV_COLUMNS: [&str; 14] = [
    "experiment",
    "regime",
    "s",
    "alpha",
    "N_or_j",
    "param",
    "norm_t0",
    "norm_T",
    "ratio",
    "reference",
    "constant",
    "tail_mass",
    "method_disagreement",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub regime: String,
    pub s: f64,
    pub alpha: f64,
    pub n_or_j: f64,
    pub param: String,
    pub norm_t0: Option<f64>,
    pub norm_t: Option<f64>,
    pub ratio: Option<f64>,
    pub reference: Option<f64>,
    pub constant: Option<f64>,
    pub tail_mass: Option<f64>,
    pub method_disagreement: Option<f64>,
    pub wall_ms: u64,
    /// Measured quantities beyond the CSV columns.
    pub extras: BTreeMap<String, f64>,
    pub diagnostics: Vec<String>,
}

impl ReportRow {
    pub fn new(experiment: &str, regime: &str, s: f64, alpha: f64, n_or_j: f64, param: String) -> Self {
        ReportRow {
            experiment: experiment.into(),
            regime: regime.into(),
            s,
            alpha,
            n_or_j,
            param,
            norm_t0: None,
            norm_t: None,
            ratio: None,
            reference: None,
            constant: None,
            tail_mass: None,
            method_disagreement: None,
            wall_ms: 0,
            extras: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn extra(&mut self, key: &str, v: f64) {
        self.extras.insert(key.into(), v);
    }

    fn csv_record(&self) -> Vec<String> {
        let o = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        vec![
            self.experiment.clone(),
            self.regime.clone(),
            self.s.to_string(),
            self.alpha.to_string(),
            self.n_or_j.to_string(),
            self.param.clone(),
            o(self.norm_t0),
            o(self.norm_t),
            o(self.ratio),
            o(self.reference),
            o(self.constant),
            o(self.tail_mass),
            o(self.method_disagreement),
            self.wall_ms.to_string(),
        ]
    }
}

/// Least-squares slope of y against x with a 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

fn t_quantile_975(dof: usize) -> f64 {
    const T: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101,
        2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ];
    match dof {
        0 => f64::INFINITY,
        d if d <= 30 => T[d - 1],
        _ => 1.96,
    }
}

pub fn linear_fit(name: &str, xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| x.is_finite() && y.is_finite()).map(|(&x, &y)| (x, y)).collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let half = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        t_quantile_975(n - 2) * (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Some(Fit { name: name.into(), slope, intercept, ci_low: slope - half, ci_high: slope + half, points: n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflationReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub fits: Vec<Fit>,
    pub summary: BTreeMap<String, f64>,
    pub diagnostics: Vec<String>,
}

impl InflationReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        InflationReport {
            version: version_string(),
            config: config.clone(),
            rows: Vec::new(),
            fits: Vec::new(),
            summary: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }
}

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

pub fn render(report: &InflationReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for r in &report.rows {
                w.write_record(r.csv_record()).map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))
        }
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &InflationReport, format: Format, path: Option<&Path>) -> Result<()> {
    let bytes = render(report, format)?;
    match path {
        Some(p) => {
            let io = |source| Error::Io { path: p.display().to_string(), source };
            let mut f = std::fs::File::create(p).map_err(io)?;
            f.write_all(&bytes).map_err(io)
        }
        None => std::io::stdout().write_all(&bytes).map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}
