//! Counting the modes where the small-dispersion flow leaves the ODE flow.

use super::config::ExperimentConfig;
use super::report::{InflationReport, ReportRow};
use super::{sweep_map, timed};
use crate::error::{invalid, Result};
use crate::evolution::{split_step_run, EquationSpec, StepperConfig};
use crate::profile::{periodize, CompactProfile};
use crate::spectral::{sobolev_norm, NormSpec, SpectralField};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaCount {
    /// #{|n| ≤ C₀L : |ŵ_n − v̂_n| ≥ c/(4L)}.
    pub count: usize,
    /// L·δ^{2α}.
    pub reference: f64,
    /// Modes |n| ≤ C₀L outside Γ.
    pub complement: usize,
    /// Outside Γ, how many keep |v̂_n| ≥ c/(4L).
    pub complement_above: usize,
}

pub fn gamma_discrepancy(w: &SpectralField, v: &SpectralField, c: f64, c0: f64, delta: f64, alpha: f64) -> Result<GammaCount> {
    if (w.period() - v.period()).abs() > 1e-12 * w.period() {
        return invalid("fields live on different tori");
    }
    if !(c > 0.0 && c0 >= 0.0) {
        return invalid(format!("need c > 0 and C0 >= 0, got c = {c}, C0 = {c0}"));
    }
    let l = w.period();
    let thr = c / (4.0 * l);
    let nmax = (c0 * l).floor() as i64;
    let (mut count, mut complement, mut above) = (0, 0, 0);
    for n in -nmax..=nmax {
        let vn = v.coeff(n);
        if (w.coeff(n) - vn).norm() >= thr {
            count += 1;
        } else {
            complement += 1;
            if vn.norm() >= thr {
                above += 1;
            }
        }
    }
    Ok(GammaCount { count, reference: l * delta.powf(2.0 * alpha), complement, complement_above: above })
}

/// ŵ(ξ, t) = ∫φ(x)e^{it|φ(x)|²}e^{−2πiξx}dx, the real-line transform of the ODE flow.
pub fn ode_transform(profile: &CompactProfile, t: f64, xi: f64) -> Complex64 {
    let (a, b) = profile.support();
    let splits = (4.0 * xi.abs() * (b - a)).ceil() as usize;
    profile.integrate(|x, v| Complex64::from_polar(v, t * v * v - 2.0 * PI * xi * x), splits, 1e-13)
}

/// (c, C₀): C₀ is the first |ξ| where |ŵ(ξ, t)| drops below |ŵ(0, t)|/2 (on either side),
/// and c is twice the minimum of |ŵ| on [−C₀, C₀].
pub fn measure_constants(profile: &CompactProfile, t: f64) -> (f64, f64) {
    let at = |xi: f64| ode_transform(profile, t, xi).norm();
    let half = at(0.0) / 2.0;
    let (a, b) = profile.support();
    let h = 1.0 / (64.0 * (b - a).max(1.0));
    let crossing = |sign: f64| {
        let mut k = 0usize;
        while at(sign * (k + 1) as f64 * h) >= half && k < 100_000 {
            k += 1;
        }
        let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if at(sign * mid) >= half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let c0 = crossing(1.0).min(crossing(-1.0));
    let samples = 64;
    let min = (-samples..=samples).map(|i| at(c0 * i as f64 / samples as f64)).fold(f64::INFINITY, f64::min);
    (2.0 * min, c0)
}

/// λ from λ^{−s−1/2}δ^{s−1/2} = δ^θ.
pub fn monomial_lambda(delta: f64, s: f64, theta: f64) -> Result<f64> {
    if s >= -0.5 {
        return invalid(format!("the monomial relation needs s < -1/2, got {s}"));
    }
    Ok(delta.powf((theta - s + 0.5) / (-s - 0.5)))
}

struct GammaPoint {
    count: GammaCount,
    period: f64,
    lambda: f64,
    c: f64,
    c0: f64,
    norm0: f64,
    norm_t: f64,
    tail: f64,
}

fn gamma_point(
    profile: &CompactProfile,
    delta: f64,
    s: f64,
    alpha: f64,
    theta: f64,
    time: f64,
    mf: f64,
    st: &StepperConfig,
) -> Result<GammaPoint> {
    let lambda = monomial_lambda(delta, s, theta)?;
    let period = delta / lambda;
    let phi = periodize(profile, period, (mf * period).ceil() as usize)?;
    let w = split_step_run(&phi, &EquationSpec::dispersionless(false), time, st)?;
    let v = split_step_run(&phi, &EquationSpec::small_dispersion(delta, alpha), time, st)?;
    let (c, c0) = measure_constants(profile, time);
    let count = gamma_discrepancy(&w.field, &v.field, c, c0, delta, alpha)?;
    Ok(GammaPoint {
        count,
        period,
        lambda,
        c,
        c0,
        norm0: sobolev_norm(&phi, NormSpec::sobolev(s))?,
        norm_t: sobolev_norm(&v.field, NormSpec::sobolev(s))?,
        tail: v.tail_mass,
    })
}

pub fn run_gamma(cfg: &ExperimentConfig) -> Result<InflationReport> {
    cfg.validate()?;
    let sec = cfg.gamma_section();
    let profile = sec.profile.build()?.centered();
    let stepper = cfg.stepper();
    let deltas = cfg.sweep_values();
    let rows = sweep_map(&deltas, |_, d| {
        timed(cfg.record_timing, || {
            let p = gamma_point(&profile, d, sec.s, sec.alpha, sec.theta, sec.time, sec.mode_factor, &stepper)?;
            let mut row = ReportRow::new("gamma", "supercritical_scaling", sec.s, sec.alpha, sec.j as f64, format!("delta={d}"));
            row.norm_t0 = Some(p.norm0);
            row.norm_t = Some(p.norm_t);
            row.ratio = Some(p.norm_t / p.norm0);
            row.reference = Some(p.count.reference);
            row.constant = Some(p.count.count as f64 / (p.period * d * d));
            row.tail_mass = Some(p.tail);
            row.extra("delta", d);
            row.extra("lambda", p.lambda);
            row.extra("period", p.period);
            row.extra("c_measured", p.c);
            row.extra("C0", p.c0);
            row.extra("gamma_count", p.count.count as f64);
            row.extra("complement_count", p.count.complement as f64);
            row.extra("complement_above_threshold", p.count.complement_above as f64);
            Ok(row)
        })
    });
    let mut report = InflationReport::new(cfg);
    for r in rows {
        report.rows.push(r?);
    }
    let cs: Vec<f64> = report.rows.iter().filter_map(|r| r.constant).collect();
    let (lo, hi) = cs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
    let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    report.summary.insert("constant_spread".into(), spread);
    if !spread.is_finite() {
        report.diagnostics.push("Gamma is empty at some delta: the count is not comparable to L*delta^2".into());
    }
    Ok(report)
}
