//! Two-block data φ̂ = R(1_{N+Q_A} + 1_{2N+Q_A}) and its regime parameters.

use crate::error::{invalid, Result};
use crate::spectral::SpectralField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    CritHalf,
    NegativeS,
    FracCrit,
    SupercriticalScaling,
    PositiveS,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::CritHalf => "crit_half",
            Regime::NegativeS => "negative_s",
            Regime::FracCrit => "frac_crit",
            Regime::SupercriticalScaling => "supercritical_scaling",
            Regime::PositiveS => "positive_s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InflationScenario {
    pub regime: Regime,
    pub s: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub theta: f64,
}

fn one() -> f64 {
    1.0
}

impl InflationScenario {
    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() || !(self.alpha > 0.0) {
            return invalid("scenario needs finite s and alpha > 0");
        }
        match self.regime {
            Regime::CritHalf if self.s != -0.5 => invalid("crit_half requires s = -1/2"),
            Regime::FracCrit if !(self.theta > 0.0 && self.s < -0.5 - 3.0 * self.theta) => {
                invalid(format!("frac_crit requires theta > 0 and s < -1/2 - 3 theta, got s={}, theta={}", self.s, self.theta))
            }
            Regime::NegativeS if self.s >= 0.0 => invalid("negative_s requires s < 0"),
            _ => Ok(()),
        }
    }
}

/// f(A) of the Ξ_k bounds.
pub fn f_factor(a: f64, s: f64) -> f64 {
    if s < -0.5 {
        1.0
    } else if s == -0.5 {
        a.ln().sqrt()
    } else {
        a.powf(0.5 + s)
    }
}

pub fn g_factor(n: f64, s: f64) -> Result<f64> {
    if !(s < 0.0) || !(n >= 16.0) {
        return invalid(format!("g(N) needs s < 0 and N >= 16, got s={s}, N={n}"));
    }
    Ok(if s < -0.5 {
        1.0
    } else if s == -0.5 {
        n.ln().ln().sqrt()
    } else {
        n.ln().powf(0.5 + s)
    })
}

/// (R, A) for the block regimes.
pub fn block_parameters(regime: Regime, n: f64, s: f64, theta: f64) -> Result<(f64, f64)> {
    if !(n > 1.0) {
        return invalid(format!("N must exceed 1, got {n}"));
    }
    let ln = n.ln();
    match regime {
        Regime::CritHalf => Ok((1.0, n / ln.powf(1.0 / 16.0))),
        Regime::NegativeS => Ok((n.powf(-s) / ln, ln)),
        Regime::FracCrit => Ok((n.powf(-0.5 - s), n.powf(1.0 - theta))),
        other => invalid(format!("regime {} has no two-block data", other.label())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationTime {
    pub t_n: f64,
    /// Local-theory horizon ‖φ‖_{FL¹}^{−2} ∼ (RA)^{−2}.
    pub t_star: f64,
}

pub fn inflation_time(regime: Regime, n: f64, s: f64, theta: f64) -> Result<InflationTime> {
    let (r, a) = block_parameters(regime, n, s, theta)?;
    let ln = n.ln();
    let t_n = match regime {
        Regime::CritHalf => 1.0 / (n * n * ln.powf(1.0 / 8.0)),
        Regime::NegativeS => n.powf(2.0 * s) / ln,
        Regime::FracCrit => n.powf(2.0 * s - 1.0 - theta),
        _ => unreachable!(),
    };
    Ok(InflationTime { t_n, t_star: (r * a).powi(-2) })
}

/// Lower bound for ‖P_{<N}w(T_N)‖_{H^s} up to the implicit constant.
pub fn predicted_lower_bound(regime: Regime, n: f64, s: f64, theta: f64) -> Result<f64> {
    let ln = n.ln();
    match regime {
        Regime::CritHalf => Ok(ln.powf(0.25)),
        Regime::NegativeS => Ok(n.powf(-s) * ln.powi(-2) * g_factor(n, s)?),
        Regime::FracCrit => Ok(n.powf(-0.5 - s - 3.0 * theta)),
        other => invalid(format!("regime {} has no block lower bound", other.label())),
    }
}

/// Predicted size of ‖φ_N‖_{H^s}.
pub fn predicted_initial_norm(regime: Regime, n: f64, theta: f64) -> Result<f64> {
    let ln = n.ln();
    match regime {
        Regime::CritHalf => Ok(ln.powf(-1.0 / 32.0)),
        Regime::NegativeS => Ok(ln.powf(-0.5)),
        Regime::FracCrit => Ok(n.powf(-0.5 * theta)),
        other => invalid(format!("regime {} has no block data", other.label())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    pub r: f64,
    pub a: f64,
    pub t_n: f64,
    pub t_star: f64,
    pub predicted_lower_bound: f64,
    pub g_factor: f64,
    pub f_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub j: u32,
    pub lambda: f64,
    pub delta: f64,
    pub period: f64,
    /// λ^{−s+1/2−α}δ^{s−1/2}.
    pub prefactor: f64,
    /// Value the prefactor is required to stay below.
    pub target: f64,
    /// Rescaled inflation time λ^{2α}.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSchedule {
    pub regime: Regime,
    pub block: Option<BlockParams>,
    pub scaling: Option<ScalingParams>,
}

pub fn block_schedule(regime: Regime, n: f64, s: f64, theta: f64) -> Result<RegimeSchedule> {
    let (r, a) = block_parameters(regime, n, s, theta)?;
    let time = inflation_time(regime, n, s, theta)?;
    Ok(RegimeSchedule {
        regime,
        block: Some(BlockParams {
            r,
            a,
            t_n: time.t_n,
            t_star: time.t_star,
            predicted_lower_bound: predicted_lower_bound(regime, n, s, theta)?,
            g_factor: g_factor(n, s)?,
            f_factor: f_factor(a, s),
        }),
        scaling: None,
    })
}

/// Two-block data with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBlock {
    pub regime: Regime,
    pub n: u64,
    pub s: f64,
    pub theta: f64,
    pub r: f64,
    pub a: f64,
}

pub fn build_two_block_data(regime: Regime, n: u64, s: f64, theta: f64) -> Result<TwoBlock> {
    let (r, a) = block_parameters(regime, n as f64, s, theta)?;
    let tb = TwoBlock { regime, n, s, theta, r, a };
    if regime == Regime::NegativeS {
        if !(a < n as f64) {
            return invalid(format!("blocks overlap or touch 0: A = {a} >= N = {n}"));
        }
    } else {
        let h = tb.half_width();
        if 2 * h >= n || h >= n {
            return invalid(format!("blocks overlap or touch 0: floor(A/2) = {h}, N = {n}"));
        }
    }
    Ok(tb)
}

impl TwoBlock {
    /// ⌊A/2⌋.
    pub fn half_width(&self) -> u64 {
        (self.a / 2.0).floor() as u64
    }

    /// Integer block centred at c: {|n − c| ≤ ⌊A/2⌋}.
    pub fn block(&self, c: u64) -> std::ops::RangeInclusive<i64> {
        let h = self.half_width() as i64;
        (c as i64 - h)..=(c as i64 + h)
    }

    pub fn modes_per_block(&self) -> u64 {
        2 * self.half_width() + 1
    }

    /// Torus data on T_1; the truncation `m` must contain both blocks.
    pub fn on_torus(&self, m: usize) -> Result<SpectralField> {
        let top = (2 * self.n + self.half_width()) as usize;
        if m < top {
            return invalid(format!("truncation {m} cannot hold modes up to {top}"));
        }
        let (b1, b2) = (self.block(self.n), self.block(2 * self.n));
        let r = self.r;
        SpectralField::from_fn(
            1.0,
            m,
            |k| {
                if b1.contains(&k) || b2.contains(&k) {
                    Complex64::new(r, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
        )
    }

    /// Natural truncation: the outer block edge.
    pub fn torus_field(&self) -> Result<SpectralField> {
        self.on_torus((2 * self.n + self.half_width()) as usize)
    }

    /// L-periodization of the real-line data R·1_{blocks}: modes n with n/L in a block, amplitude R/L.
    pub fn periodized(&self, period: f64) -> Result<SpectralField> {
        let half = 0.5 * self.a;
        let n = self.n as f64;
        let hi = ((2.0 * n + half) * period).floor() as usize;
        let inside = |k: i64| {
            let xi = k as f64 / period;
            (xi - n).abs() <= half || (xi - 2.0 * n).abs() <= half
        };
        let amp = self.r / period;
        SpectralField::from_fn(period, hi, |k| if inside(k) { Complex64::new(amp, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn field(&self, surrogate_period: f64) -> Result<SpectralField> {
        if self.regime == Regime::NegativeS {
            self.periodized(surrogate_period)
        } else {
            self.torus_field()
        }
    }

    pub fn schedule(&self) -> Result<RegimeSchedule> {
        block_schedule(self.regime, self.n as f64, self.s, self.theta)
    }
}
