//! Scaling schedules (λ_j, δ_j, L_j) for supercritical inflation.

use super::scenario::{Regime, RegimeSchedule, ScalingParams};
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleOptions {
    pub margin: f64,
    pub l_min: f64,
    pub delta_start: f64,
    /// Constant inside the logarithm of the s = −1/2 branch.
    pub c1: f64,
    /// Exponent constant of the positive-s branch.
    pub c0: f64,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions { margin: 100.0, l_min: 2.0, delta_start: 0.5, c1: 1.0, c0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Power,
    Log,
    Unit,
    PositiveS,
}

/// ln of the prefactor target as a function of ln δ.
fn ln_target(branch: Branch, ln_delta: f64, s: f64, theta: f64, alpha: f64, o: &ScheduleOptions) -> f64 {
    match branch {
        Branch::Power => theta * ln_delta,
        Branch::Log => -0.25 * (o.c1.ln() - 2.0 * alpha * ln_delta).ln(),
        Branch::Unit => 0.0,
        Branch::PositiveS => -0.5 * o.c0 * s * (-ln_delta).ln(),
    }
}

const LN_FLOOR: f64 = -700.0;

pub fn supercritical_schedule(j: u32, s: f64, alpha: f64, theta: f64) -> Result<RegimeSchedule> {
    supercritical_schedule_with(j, s, alpha, theta, &ScheduleOptions::default())
}

pub fn supercritical_schedule_with(j: u32, s: f64, alpha: f64, theta: f64, o: &ScheduleOptions) -> Result<RegimeSchedule> {
    if j == 0 || !(alpha > 0.0) || !s.is_finite() {
        return invalid("schedule needs j >= 1, alpha > 0 and finite s");
    }
    if !(o.margin >= 1.0 && o.l_min >= 1.0 && o.delta_start > 0.0 && o.delta_start < 1.0) {
        return invalid("schedule options out of range");
    }
    let e_lambda = -s + 0.5 - alpha;
    if !(e_lambda > 0.0) {
        return invalid(format!("s = {s} is not supercritical for alpha = {alpha} (needs s < {})", 0.5 - alpha));
    }
    let branch = if s < -0.5 {
        if !(theta > 0.0) {
            return invalid("the power branch needs theta > 0");
        }
        Branch::Power
    } else if s == -0.5 {
        if !(o.c1 > 0.0) {
            return invalid("c1 must be positive");
        }
        Branch::Log
    } else if s < 0.0 {
        Branch::Unit
    } else {
        if !(o.c0 > 0.0) || s == 0.0 {
            return invalid("positive-s branch needs s > 0 and c0 > 0");
        }
        Branch::PositiveS
    };
    let ln_bound = -(o.margin * j as f64).ln();
    // λ^{e}δ^{s−1/2} = target(δ)
    let solve = |ld: f64| (ln_target(branch, ld, s, theta, alpha, o) - (s - 0.5) * ld) / e_lambda;
    let admissible = |ld: f64| {
        let ll = solve(ld);
        let target_ok = branch == Branch::Unit || ln_target(branch, ld, s, theta, alpha, o) <= ln_bound;
        let ln_period = ld - ll;
        target_ok && ll < ld && 2.0 * alpha * ll <= ln_bound && ln_period >= o.l_min.ln() && ll > LN_FLOOR
    };
    let mut ld = o.delta_start.ln();
    if branch == Branch::Power {
        ld = ld.min(ln_bound / theta);
    }
    if branch == Branch::PositiveS {
        let need = (-ln_bound * 2.0 / (o.c0 * s)).exp();
        if !need.is_finite() {
            return Err(Error::InfeasibleAtPrecision(format!("|log delta| must exceed exp({})", -ln_bound * 2.0 / (o.c0 * s))));
        }
        ld = ld.min(-need);
    }
    if branch == Branch::Log {
        let need = (o.c1.ln() - (-4.0 * ln_bound).exp()) / (2.0 * alpha);
        ld = ld.min(need);
    }
    while !admissible(ld) {
        if solve(ld) <= LN_FLOOR || ld <= LN_FLOOR || !ld.is_finite() {
            return Err(Error::InfeasibleAtPrecision(format!(
                "no admissible delta above the floating-point floor (log delta reached {ld:.3e})"
            )));
        }
        ld -= std::f64::consts::LN_2;
    }
    let ll = solve(ld);
    let (lambda, delta) = (ll.exp(), ld.exp());
    let prefactor = lambda.powf(e_lambda) * delta.powf(s - 0.5);
    Ok(RegimeSchedule {
        regime: Regime::SupercriticalScaling,
        block: None,
        scaling: Some(ScalingParams {
            j,
            lambda,
            delta,
            period: delta / lambda,
            prefactor,
            target: ln_bound.exp(),
            time: lambda.powf(2.0 * alpha),
        }),
    })
}
