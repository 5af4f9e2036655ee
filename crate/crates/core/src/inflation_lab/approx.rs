//! Small-dispersion approximation of the dispersionless flow, and periodization convergence.

use super::config::ExperimentConfig;
use super::report::{linear_fit, InflationReport, ReportRow};
use super::{sweep_map, timed};
use crate::constructions::moment_vanishing;
use crate::error::invalid;
use crate::error::Result;
use crate::evolution::{split_step_run, EquationSpec, StepperConfig};
use crate::profile::{mollifier_hat, periodize, CompactProfile, Shape};
use crate::quad::integrate_real;
use crate::spectral::{sobolev_norm, NormSpec, SpectralField};

pub struct ApproxPoint {
    pub error: f64,
    pub tail_mass: f64,
    pub norm_t0: f64,
}

/// ‖v(t) − w(t)‖_{H¹(T_L)} with v the small-dispersion NLS and w the ODE, both on the stepper grid.
pub fn approximation_error(phi: &SpectralField, delta: f64, alpha: f64, t: f64, cfg: &StepperConfig) -> Result<ApproxPoint> {
    let w = split_step_run(phi, &EquationSpec::dispersionless(false), t, cfg)?;
    let v = split_step_run(phi, &EquationSpec::small_dispersion(delta, alpha), t, cfg)?;
    Ok(ApproxPoint {
        error: sobolev_norm(&v.field.sub(&w.field)?, NormSpec::sobolev(1.0))?,
        tail_mass: v.tail_mass,
        norm_t0: sobolev_norm(phi, NormSpec::sobolev(1.0))?,
    })
}

pub fn run_approximation(cfg: &ExperimentConfig) -> Result<InflationReport> {
    cfg.validate()?;
    let sec = cfg.approx_section();
    let profile = sec.profile.build()?.centered();
    let stepper = cfg.stepper();
    let deltas = cfg.sweep_values();
    let mut tasks = Vec::new();
    for &l in &sec.periods {
        for &d in &deltas {
            for &t in &sec.times {
                tasks.push((l, d, t));
            }
        }
    }
    let fields = sweep_map(&sec.periods, |_, l| periodize(&profile, l, (sec.mode_factor * l).ceil() as usize));
    let fields: Vec<SpectralField> = fields.into_iter().collect::<Result<_>>()?;
    let index: Vec<f64> = (0..tasks.len()).map(|i| i as f64).collect();
    let rows = sweep_map(&index, |i, _| {
        let (l, d, t) = tasks[i];
        let phi = &fields[sec.periods.iter().position(|&p| p == l).unwrap()];
        timed(cfg.record_timing, || {
            let p = approximation_error(phi, d, sec.alpha, t, &stepper)?;
            let mut row = ReportRow::new("approx", "small_dispersion", 1.0, sec.alpha, l, format!("delta={d} t={t}"));
            row.norm_t0 = Some(p.norm_t0);
            row.norm_t = Some(p.error);
            row.ratio = Some(p.error / p.norm_t0);
            let reference = d * d;
            row.reference = Some(reference);
            row.constant = if reference > 0.0 { Some(p.error / reference) } else { None };
            row.tail_mass = Some(p.tail_mass);
            row.extra("delta", d);
            row.extra("t", t);
            Ok(row)
        })
    });
    let mut report = InflationReport::new(cfg);
    for r in rows {
        report.rows.push(r?);
    }
    for &l in &sec.periods {
        for &t in &sec.times {
            let pts: Vec<(f64, f64)> = report
                .rows
                .iter()
                .filter(|r| r.n_or_j == l && r.extras["t"] == t && r.extras["delta"] > 0.0)
                .map(|r| (r.extras["delta"].ln(), r.norm_t.unwrap().ln()))
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            report.fits.extend(linear_fit(&format!("log_error_vs_log_delta L={l} t={t}"), &xs, &ys));
        }
    }
    let t_last = *sec.times.last().unwrap();
    let mut worst = 1.0f64;
    for &d in &deltas {
        let errs: Vec<f64> =
            report.rows.iter().filter(|r| r.extras["delta"] == d && r.extras["t"] == t_last).map(|r| r.norm_t.unwrap()).collect();
        let (lo, hi) = errs.iter().fold((f64::MAX, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
        if lo > 0.0 {
            worst = worst.max(hi / lo);
        }
    }
    report.summary.insert("max_error_ratio_across_L".into(), worst);
    if let Some(m) = report.fits.iter().filter(|f| f.name.ends_with(&format!("t={t_last}"))).map(|f| f.slope).reduce(f64::min) {
        report.summary.insert("min_slope".into(), m);
    }
    Ok(report)
}

/// Radius beyond which the profile transform is below `tol` relative to its scale.
fn transform_cutoff(profile: &CompactProfile, tol: f64) -> f64 {
    match profile.shape() {
        Shape::Mollified { eps, .. } => {
            let mut x = 8.0;
            while mollifier_hat(eps * x).abs() > tol && x < 1e6 {
                x *= 1.25;
            }
            x
        }
        Shape::Derivative { .. } => {
            let mut x = 4.0;
            while transform_decay(profile, x) > tol && x < 1e4 {
                x *= 1.25;
            }
            x
        }
        Shape::Steps(_) => f64::INFINITY,
    }
}

fn transform_decay(profile: &CompactProfile, x: f64) -> f64 {
    let scale = profile.fourier(0.25).norm().max(profile.fourier(0.5).norm()).max(1e-300);
    (profile.fourier(x).norm().max(profile.fourier(1.1 * x).norm())) / scale
}

/// ‖f‖_{H^s(ℝ)} (or Ḣ^s) by quadrature of |f̂|² out to the transform cutoff.
pub fn line_norm(profile: &CompactProfile, s: f64, homogeneous: bool) -> Result<f64> {
    let cutoff = transform_cutoff(profile, 1e-10);
    if !cutoff.is_finite() {
        return invalid("step profiles have no finite transform cutoff; mollify first");
    }
    let weight = |xi: f64| if homogeneous { xi.abs().powf(2.0 * s) } else { (1.0 + xi * xi).powf(s) };
    let pieces = (cutoff / 0.25).ceil() as usize;
    let mut breaks: Vec<f64> = (1..40).rev().map(|k| cutoff / pieces as f64 * 0.5f64.powi(k)).collect();
    breaks.insert(0, 0.0);
    breaks.extend((1..=pieces).map(|i| cutoff * i as f64 / pieces as f64));
    let v = integrate_real(|xi| weight(xi) * profile.fourier(xi).norm_sqr(), &breaks, 1e-13);
    Ok((2.0 * v).sqrt())
}

/// Ḣ^s(ℝ) finiteness near ξ = 0: |f̂|² ∼ |ξ|^{2κ} with κ vanishing moments, integrable iff 2s + 2κ > −1.
pub fn homogeneous_norm_finite(profile: &CompactProfile, s: f64) -> bool {
    let r = moment_vanishing(profile, 8);
    let scale = profile.support_radius().max(1.0);
    let kappa = r.moments.iter().enumerate().take_while(|(j, m)| m.abs() <= 1e-9 * scale.powi(*j as i32 + 1)).count();
    2.0 * s + 2.0 * kappa as f64 > -1.0
}

/// Truncation M(L) = ⌈L²/2⌉, i.e. frequencies |ξ| ≤ L/2.
pub fn periodization_modes(period: f64) -> usize {
    (period * period / 2.0).ceil() as usize
}

pub fn run_periodization(cfg: &ExperimentConfig) -> Result<InflationReport> {
    cfg.validate()?;
    let sec = cfg.periodize_section();
    let profile = sec.profile.build()?.centered();
    let periods = cfg.sweep_values();
    let mut report = InflationReport::new(cfg);
    let mut line = Vec::new();
    for &s in &sec.s_values {
        if sec.homogeneous && !homogeneous_norm_finite(&profile, s) {
            report.diagnostics.push(format!("s={s}: homogeneous norm diverges at xi = 0 for this profile"));
            line.push(None);
        } else {
            line.push(Some(line_norm(&profile, s, sec.homogeneous)?));
        }
    }
    let per_l = sweep_map(&periods, |_, l| -> Result<Vec<ReportRow>> {
        let start = std::time::Instant::now();
        let f = periodize(&profile, l, periodization_modes(l))?;
        let mut rows = Vec::new();
        for (si, &s) in sec.s_values.iter().enumerate() {
            let mut row = ReportRow::new("periodize", "real_line", s, 0.0, l, format!("s={s}"));
            let spec = if sec.homogeneous { NormSpec::homogeneous(s) } else { NormSpec::sobolev(s) };
            let torus = sobolev_norm(&f, spec)?;
            row.norm_t = Some(torus);
            row.extra("modes", f.half_width() as f64);
            match line[si] {
                Some(r) => {
                    row.norm_t0 = Some(r);
                    row.reference = Some(r);
                    row.ratio = Some(torus / r);
                    row.constant = Some((torus - r).abs());
                }
                None => row.diagnostics.push("divergent".into()),
            }
            rows.push(row);
        }
        if cfg.record_timing {
            let ms = start.elapsed().as_millis() as u64;
            rows.iter_mut().for_each(|r| r.wall_ms = ms);
        }
        Ok(rows)
    });
    let mut by_l = Vec::new();
    for r in per_l {
        by_l.push(r?);
    }
    for (si, &s) in sec.s_values.iter().enumerate() {
        for rows in &by_l {
            report.rows.push(rows[si].clone());
        }
        let errs: Vec<f64> = report.rows.iter().filter(|r| r.s == s).filter_map(|r| r.constant).collect();
        let dec = errs.len() == periods.len() && errs.windows(2).all(|w| w[1] < w[0]);
        report.summary.insert(format!("error_strictly_decreasing s={s}"), if dec { 1.0 } else { 0.0 });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::appendix_profile;
    use crate::profile::{ProfileKind, StepPiece};

    #[test]
    fn zero_dispersion_has_zero_error() {
        let p = appendix_profile(ProfileKind::Derivative, 1).unwrap();
        let phi = periodize(&p, 16.0, 64).unwrap();
        let cfg = StepperConfig { dt: 1e-2, ..StepperConfig::default() };
        assert_eq!(approximation_error(&phi, 0.0, 1.0, 1.0, &cfg).unwrap().error, 0.0);
    }

    #[test]
    fn homogeneous_finiteness() {
        let psi1 = appendix_profile(ProfileKind::Psi1, 1).unwrap();
        assert!(homogeneous_norm_finite(&psi1, -0.5));
        let ind = CompactProfile::steps(ProfileKind::Steps, vec![StepPiece { a: -1.0, b: 1.0, value: 1.0 }]).unwrap();
        assert!(!homogeneous_norm_finite(&ind, -0.5));
        assert!(homogeneous_norm_finite(&ind, -0.4));
    }

    #[test]
    fn line_norm_l2_matches_physical_space() {
        let p = appendix_profile(ProfileKind::Mollified, 1).unwrap();
        let v = line_norm(&p, 0.0, false).unwrap();
        let phys = integrate_real(|x| p.value(x).powi(2), &p.breakpoints(), 1e-13).sqrt();
        assert!((v - phys).abs() < 1e-8 * phys, "{v} {phys}");
    }
}
