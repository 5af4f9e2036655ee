//! Two-block inflation runs: exact ODE, split-step PDE and the first Picard iterate.

use super::config::{DataKind, EvolutionMethod, ExperimentConfig, InflateSection};
use super::report::{linear_fit, InflationReport, ReportRow};
use super::{sweep_map, timed};
use crate::constructions::{build_two_block_data, inflation_time, predicted_lower_bound, two_block_xi1, InflationScenario};
use crate::error::Result;
use crate::evolution::{
    interaction_picture, ode_exact_evolve, picard_expansion_with_budget, rk4_spectral_evolve, split_step_run, EquationSpec, Method,
    StepperConfig,
};
use crate::spectral::{fourier_lebesgue_norm, project_below, sobolev_norm, NormSpec, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// T²N^{2α}‖φ‖²_{FL¹}‖φ‖_{FL^∞} + Σ_{k=2}^{4} T^k‖φ‖^{2k}_{FL¹}‖φ‖_{FL^∞}.
pub fn duhamel_budget(t: f64, n: f64, alpha: f64, fl1: f64, flinf: f64) -> f64 {
    let mut b = t * t * n.powf(2.0 * alpha) * fl1 * fl1 * flinf;
    for k in 2..=4 {
        b += t.powi(k) * fl1.powi(2 * k as i32) * flinf;
    }
    b
}

/// t²/2·max|Φ|·‖φ‖²_{FL¹}‖φ‖_{FL^∞} + (e^x − 1 − x)‖φ‖_{FL^∞} with x = t‖φ‖²_{FL¹}.
pub fn picard_budget(phi: &SpectralField, t: f64, alpha: f64) -> Result<f64> {
    let fl1 = fourier_lebesgue_norm(phi, 0.0, 1.0)?;
    let flinf = fourier_lebesgue_norm(phi, 0.0, f64::INFINITY)?;
    let w = phi.support_width() as f64;
    let base = (2.0 * PI * w / phi.period()).powf(2.0 * alpha);
    let phi_max = (3f64.powf(2.0 * alpha) + 3.0) * base;
    let x = t * fl1 * fl1;
    let tail = if x < 1e-3 { x * x / 2.0 + x.powi(3) / 6.0 } else { x.exp_m1() - x };
    Ok(0.5 * t * t * phi_max * fl1 * fl1 * flinf + tail * flinf)
}

fn random_data(seed: u64, modes: usize, amp: f64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::from_fn(1.0, modes.max(1), |_| Complex64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
}

fn sup_diff(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    fourier_lebesgue_norm(&a.sub(b)?, 0.0, f64::INFINITY)
}

struct Point<'a> {
    sc: InflationScenario,
    sec: &'a InflateSection,
    stepper: StepperConfig,
    seed: u64,
}

fn inflate_point(p: &Point, index: usize, n_val: f64) -> Result<ReportRow> {
    let sc = p.sc;
    let sec = p.sec;
    let regime = sc.regime;
    let mut row = ReportRow::new("inflate", regime.label(), sc.s, sc.alpha, n_val, String::new());
    let time = inflation_time(regime, n_val, sc.s, sc.theta)?;
    let t = time.t_n;
    row.param = format!("T_N={t:e}");
    row.extra("T_N", t);
    row.extra("T_star", time.t_star);
    let (phi, reference) = match sec.data {
        DataKind::TwoBlock => {
            let tb = build_two_block_data(regime, n_val as u64, sc.s, sc.theta)?;
            row.extra("R", tb.r);
            row.extra("A", tb.a);
            row.extra("xi1_constant", two_block_xi1(&tb, t, sec.surrogate_period)?.ratio);
            (tb.field(sec.surrogate_period)?, Some(predicted_lower_bound(regime, n_val, sc.s, sc.theta)?))
        }
        DataKind::Random => (random_data(p.seed.wrapping_add(index as u64), sec.random_modes, sec.random_amplitude)?, None),
        DataKind::Zero => (SpectralField::zeros(1.0, 1)?, None),
    };
    let period = phi.period();
    let spec = NormSpec::sobolev(sc.s);
    let cut = (n_val * period).ceil() as u64;
    let low = |f: &SpectralField| sobolev_norm(&project_below(f, cut), spec);
    let norm0 = sobolev_norm(&phi, spec)?;
    row.norm_t0 = Some(norm0);
    row.reference = reference;

    let width = phi.support_width().max(1);
    let out = phi.resized((sec.output_factor * width).max(phi.half_width()))?;
    let fl1 = fourier_lebesgue_norm(&phi, 0.0, 1.0)?;
    let flinf = fourier_lebesgue_norm(&phi, 0.0, f64::INFINITY)?;
    let has = |m: EvolutionMethod| sec.methods.contains(&m);

    let mut candidates: Vec<(&str, SpectralField)> = Vec::new();
    let mut tail = None;
    if has(EvolutionMethod::Ode) {
        let w = ode_exact_evolve(&out, t, sec.wick)?;
        tail = Some(w.tail_mass);
        candidates.push(("ode", w.field));
    }
    if has(EvolutionMethod::SplitStep) {
        let eq = EquationSpec { wick: sec.wick, ..EquationSpec::fractional(sc.alpha) };
        let cfg = StepperConfig { dt: t / sec.steps as f64, ..p.stepper };
        let u = match cfg.method {
            Method::SplitStep => {
                let e = split_step_run(&out, &eq, t, &cfg)?;
                row.extra("tail_mass_split_step", e.tail_mass);
                e.field
            }
            Method::Rk4 => rk4_spectral_evolve(&out, &eq, t, &cfg)?,
        };
        candidates.push(("split_step", interaction_picture(&u, t, sc.alpha)));
    }
    if has(EvolutionMethod::Picard) {
        if sec.wick {
            row.diagnostics.push("picard skipped: the Duhamel iterate is implemented without Wick ordering".into());
        } else {
            match picard_expansion_with_budget(&phi, t, sc.alpha, 1, sec.picard_budget) {
                Ok(f) => candidates.push(("picard", f)),
                Err(crate::Error::Budget { required, limit, .. }) => {
                    row.diagnostics.push(format!("picard skipped: {required:e} triples exceed the budget {limit:e}"))
                }
                Err(e) => return Err(e),
            }
        }
    }
    row.tail_mass = tail;

    let b_split = sec.budget_factor * duhamel_budget(t, n_val, sc.alpha, fl1, flinf);
    let b_picard = sec.budget_factor * picard_budget(&phi, t, sc.alpha)?;
    let budget_for = |a: &str, b: &str| match (a, b) {
        ("ode", "split_step") => b_split,
        ("ode", "picard") => b_picard,
        _ => b_split + b_picard,
    };
    let mut worst: Option<f64> = None;
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let (na, fa) = &candidates[i];
            let (nb, fb) = &candidates[j];
            let d = sup_diff(fa, fb)?;
            let b = budget_for(na, nb);
            row.extra(&format!("diff_{na}_{nb}"), d);
            row.extra(&format!("budget_{na}_{nb}"), b);
            let q = if b > 0.0 {
                d / b
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = Some(worst.map_or(q, |w: f64| w.max(q)));
        }
    }
    row.method_disagreement = worst;
    for (name, f) in &candidates {
        row.extra(&format!("norm_T_{name}"), sobolev_norm(f, spec)?);
        row.extra(&format!("low_norm_T_{name}"), low(f)?);
    }
    if worst.is_some_and(|q| q > 1.0) {
        row.diagnostics.push(format!("row aborted: methods disagree beyond budget (worst diff/budget = {:e})", worst.unwrap()));
        return Ok(row);
    }
    let (_, main) = &candidates[0];
    let norm_t = sobolev_norm(main, spec)?;
    row.norm_t = Some(norm_t);
    row.ratio = if norm0 > 0.0 { Some(norm_t / norm0) } else { None };
    if row.ratio.is_none() {
        row.diagnostics.push("ratio undefined: initial norm is 0".into());
    }
    if let Some(r) = reference {
        row.constant = Some(low(main)? / r);
    }
    Ok(row)
}

pub fn run_inflation(cfg: &ExperimentConfig) -> Result<InflationReport> {
    cfg.validate()?;
    let sec = cfg.inflate_section();
    let point = Point { sc: cfg.scenario(), sec: &sec, stepper: cfg.stepper(), seed: cfg.seed };
    let values = cfg.sweep_values();
    let rows = sweep_map(&values, |i, n| timed(cfg.record_timing, || inflate_point(&point, i, n)));
    let mut report = InflationReport::new(cfg);
    for r in rows {
        report.rows.push(r?);
    }
    let ok: Vec<&ReportRow> = report.rows.iter().filter(|r| r.ratio.is_some()).collect();
    let loglog: Vec<f64> = ok.iter().map(|r| r.n_or_j.ln().ln()).collect();
    let ratio: Vec<f64> = ok.iter().map(|r| r.ratio.unwrap().ln()).collect();
    report.fits.extend(linear_fit("log_ratio_vs_log_log_N", &loglog, &ratio));
    let consts: Vec<f64> = ok.iter().filter_map(|r| r.constant.map(f64::ln)).collect();
    if consts.len() == loglog.len() {
        report.fits.extend(linear_fit("log_constant_vs_log_log_N", &loglog, &consts));
    }
    let ratios: Vec<f64> = ok.iter().map(|r| r.ratio.unwrap()).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    report.summary.insert("rows_reported".into(), ok.len() as f64);
    report.summary.insert("ratio_strictly_increasing".into(), if increasing { 1.0 } else { 0.0 });
    if let Some(m) = ratios.iter().cloned().reduce(f64::min) {
        report.summary.insert("min_ratio".into(), m);
    }
    for r in &report.rows {
        for d in &r.diagnostics {
            report.diagnostics.push(format!("N={}: {d}", r.n_or_j));
        }
    }
    Ok(report)
}
