//! Grid search for block triples (R, A, T) that meet all inflation conditions at once.

use super::config::{ExperimentConfig, FeasibilitySection};
use super::report::{InflationReport, ReportRow};
use super::{sweep_map, timed};
use crate::constructions::{block_parameters, f_factor, inflation_time, Regime};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub r: f64,
    pub a: f64,
    pub t: f64,
}

/// Slacks in decades for (a) RA^{1/2}N^s ≪ 1, (b) TR²A² ≪ 1, (c) TR³A²f(A) ≫ 1, (d) T ≲ N^{−2α},
/// plus A ≪ N (same margin), R ≥ 1, A ≥ 1. Nonnegative minimum means feasible.
pub fn condition_slacks(n: f64, s: f64, alpha: f64, margin: f64, p: Triple) -> [f64; 7] {
    let lm = margin.log10();
    let Triple { r, a, t } = p;
    [
        -lm - (r * a.sqrt() * n.powf(s)).log10(),
        -lm - (t * r * r * a * a).log10(),
        (t * r.powi(3) * a * a * f_factor(a, s)).log10() - lm,
        (n.powf(-2.0 * alpha) / t).log10(),
        (n / a).log10() - lm,
        r.log10(),
        a.log10(),
    ]
}

pub fn feasibility_score(n: f64, s: f64, alpha: f64, margin: f64, p: Triple) -> f64 {
    condition_slacks(n, s, alpha, margin, p).into_iter().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub n: f64,
    pub points: usize,
    pub feasible: usize,
    pub best: Option<(Triple, f64)>,
}

fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..k).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp()).collect(),
    }
}

/// Log-uniform R ∈ [1, N²], A ∈ [1, N], T ∈ [N^{−6}, 1], `points` per axis.
pub fn feasibility_scan(s: f64, alpha: f64, n: f64, points: usize, margin: f64) -> ScanResult {
    let rs = log_grid(1.0, n * n, points);
    let as_ = log_grid(1.0, n, points);
    let ts = log_grid(n.powi(-6), 1.0, points);
    let mut feasible = 0;
    let mut best: Option<(Triple, f64)> = None;
    for &r in &rs {
        for &a in &as_ {
            for &t in &ts {
                let p = Triple { r, a, t };
                let sc = feasibility_score(n, s, alpha, margin, p);
                if sc >= 0.0 {
                    feasible += 1;
                }
                if best.map_or(true, |(_, b)| sc > b) {
                    best = Some((p, sc));
                }
            }
        }
    }
    ScanResult { n, points: rs.len() * as_.len() * ts.len(), feasible, best }
}

/// The (R, A, T) of the s < −1/2 block schedule, or None when s ≥ −1/2.
pub fn schedule_triple(n: f64, s: f64, theta: f64) -> Option<Triple> {
    if s >= -0.5 {
        return None;
    }
    let (r, a) = block_parameters(Regime::FracCrit, n, s, theta).ok()?;
    let t = inflation_time(Regime::FracCrit, n, s, theta).ok()?.t_n;
    Some(Triple { r, a, t })
}

fn scan_row(sec: &FeasibilitySection, n: f64) -> ReportRow {
    let res = feasibility_scan(sec.s, sec.alpha, n, sec.points, sec.margin);
    let mut row = ReportRow::new("feasibility", "block_conditions", sec.s, sec.alpha, n, format!("margin={}", sec.margin));
    row.extra("grid_points", res.points as f64);
    row.extra("feasible", res.feasible as f64);
    if let Some((p, sc)) = res.best {
        row.constant = Some(sc);
        row.extra("best_R", p.r);
        row.extra("best_A", p.a);
        row.extra("best_T", p.t);
    }
    if let Some(q) = schedule_triple(n, sec.s, sec.schedule_theta) {
        let sc = feasibility_score(n, sec.s, sec.alpha, 1.0, q);
        row.reference = Some(sc);
        row.extra("schedule_score_margin1", sc);
        row.extra("schedule_score", feasibility_score(n, sec.s, sec.alpha, sec.margin, q));
    }
    row
}

pub fn run_feasibility(cfg: &ExperimentConfig) -> Result<InflationReport> {
    cfg.validate()?;
    let sec = cfg.feasibility_section();
    let mut report = InflationReport::new(cfg);
    if sec.points == 0 {
        return Ok(report);
    }
    let ns = cfg.sweep_values();
    for r in sweep_map(&ns, |_, n| timed(cfg.record_timing, || Ok(scan_row(&sec, n)))) {
        report.rows.push(r?);
    }
    let total: f64 = report.rows.iter().map(|r| r.extras["feasible"]).sum();
    report.summary.insert("feasible_total".into(), total);
    let best = report.rows.iter().filter_map(|r| r.constant).fold(f64::NEG_INFINITY, f64::max);
    report.summary.insert("best_score".into(), best);
    if let Some(q) = report.rows.iter().filter_map(|r| r.reference).reduce(f64::min) {
        report.summary.insert("schedule_min_score_margin1".into(), q);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_pairing_is_infeasible() {
        for n in [1e4, 1e6, 1e8, 1e10] {
            let r = feasibility_scan(-0.25, 0.375, n, 50, 10.0);
            assert_eq!(r.feasible, 0);
            assert!(r.best.unwrap().1 < 0.0);
        }
    }

    #[test]
    fn below_minus_half_has_feasible_triples() {
        let r = feasibility_scan(-0.75, 0.375, 1e8, 50, 10.0);
        assert!(r.feasible > 0);
        let q = schedule_triple(1e8, -0.75, 1.0 / 24.0).unwrap();
        assert!(feasibility_score(1e8, -0.75, 0.375, 1.0, q) >= 0.0);
    }

    #[test]
    fn empty_grid() {
        let r = feasibility_scan(-0.25, 0.375, 1e6, 0, 10.0);
        assert_eq!((r.points, r.feasible), (0, 0));
        assert!(r.best.is_none());
    }
}
