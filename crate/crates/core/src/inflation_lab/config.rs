//! Experiment configuration (TOML, or the JSON echo of a report).

use crate::constructions::{appendix, InflationScenario, Regime};
use crate::error::{Error, Result};
use crate::evolution::{Method, StepperConfig};
use crate::profile::{BumpDerivative, CompactProfile, ProfileKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Inflate,
    Approx,
    Periodize,
    Gamma,
    Feasibility,
}

impl Experiment {
    pub fn label(&self) -> &'static str {
        match self {
            Experiment::Inflate => "inflate",
            Experiment::Approx => "approx",
            Experiment::Periodize => "periodize",
            Experiment::Gamma => "gamma",
            Experiment::Feasibility => "feasibility",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub values: Vec<f64>,
}

/// Profile selection shared by the real-line experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    #[serde(default = "one_usize")]
    pub kappa: usize,
    /// Step base of a mollified profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<ProfileKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

fn one_usize() -> usize {
    1
}

impl ProfileConfig {
    pub fn derivative(kappa: usize) -> Self {
        ProfileConfig { kind: ProfileKind::Derivative, kappa, base: None, eps: None, width: None, skew: None, amplitude: None }
    }

    pub fn mollified(base: ProfileKind, eps: f64) -> Self {
        ProfileConfig { kind: ProfileKind::Mollified, kappa: 1, base: Some(base), eps: Some(eps), width: None, skew: None, amplitude: None }
    }

    pub fn build(&self) -> Result<CompactProfile> {
        match self.kind {
            ProfileKind::Mollified => {
                let base = self.base.unwrap_or(ProfileKind::Psi1);
                appendix::mollified_profile(base, self.eps.unwrap_or(appendix::DEFAULT_EPS))
            }
            ProfileKind::Derivative => {
                let d = appendix::default_derivative(self.kappa);
                appendix::derivative_profile(BumpDerivative {
                    kappa: self.kappa,
                    width: self.width.unwrap_or(d.width),
                    skew: self.skew.unwrap_or(d.skew),
                    amplitude: self.amplitude.unwrap_or(d.amplitude),
                    center: 0.0,
                })
            }
            kind => appendix::appendix_profile(kind, self.kappa),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    Ode,
    SplitStep,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    TwoBlock,
    Random,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InflateSection {
    pub data: DataKind,
    pub methods: Vec<EvolutionMethod>,
    /// Strang steps from 0 to T_N.
    pub steps: usize,
    /// Output half-width as a multiple of the data's support width.
    pub output_factor: usize,
    pub surrogate_period: f64,
    pub budget_factor: f64,
    pub picard_budget: f64,
    pub wick: bool,
    pub random_modes: usize,
    pub random_amplitude: f64,
}

impl Default for InflateSection {
    fn default() -> Self {
        InflateSection {
            data: DataKind::TwoBlock,
            methods: vec![EvolutionMethod::Ode, EvolutionMethod::SplitStep, EvolutionMethod::Picard],
            steps: 400,
            output_factor: 15,
            surrogate_period: 16.0,
            budget_factor: 1.0,
            picard_budget: crate::evolution::PICARD_BUDGET,
            wick: false,
            random_modes: 8,
            random_amplitude: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApproxSection {
    pub profile: ProfileConfig,
    pub alpha: f64,
    pub periods: Vec<f64>,
    pub times: Vec<f64>,
    /// M = mode_factor·L.
    pub mode_factor: f64,
}

impl Default for ApproxSection {
    fn default() -> Self {
        ApproxSection {
            profile: ProfileConfig::derivative(1),
            alpha: 1.0,
            periods: vec![32.0, 64.0, 128.0],
            times: vec![0.5, 1.0],
            mode_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodizeSection {
    pub profile: ProfileConfig,
    pub s_values: Vec<f64>,
    pub homogeneous: bool,
}

impl Default for PeriodizeSection {
    fn default() -> Self {
        PeriodizeSection {
            profile: ProfileConfig::mollified(ProfileKind::Psi1, 0.1),
            s_values: vec![-1.0, -0.5, 0.0, 1.0],
            homogeneous: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammaSection {
    pub profile: ProfileConfig,
    pub j: u32,
    pub s: f64,
    pub alpha: f64,
    pub theta: f64,
    pub time: f64,
    pub mode_factor: f64,
}

impl Default for GammaSection {
    fn default() -> Self {
        GammaSection { profile: ProfileConfig::derivative(1), j: 3, s: -1.0, alpha: 1.0, theta: 0.25, time: 1.0, mode_factor: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilitySection {
    pub s: f64,
    pub alpha: f64,
    pub points: usize,
    pub margin: f64,
    /// θ of the reference regime-iii triple.
    pub schedule_theta: f64,
}

impl Default for FeasibilitySection {
    fn default() -> Self {
        FeasibilitySection { s: -0.25, alpha: 0.375, points: 50, margin: 10.0, schedule_theta: 1.0 / 24.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<InflationScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepper: Option<StepperConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflate: Option<InflateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<ApproxSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodize: Option<PeriodizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<FeasibilitySection>,
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            seed: 0,
            record_timing: false,
            output_path: None,
            scenario: None,
            stepper: None,
            sweep: None,
            inflate: None,
            approx: None,
            periodize: None,
            gamma: None,
            feasibility: None,
        }
    }

    /// Fully populated defaults for an experiment.
    pub fn default_for(experiment: Experiment) -> Self {
        let mut c = ExperimentConfig::new(experiment);
        c.sweep = Some(Sweep { values: c.default_sweep() });
        match experiment {
            Experiment::Inflate => {
                c.scenario = Some(c.scenario());
                c.stepper = Some(StepperConfig::default());
                c.inflate = Some(InflateSection::default());
            }
            Experiment::Approx => {
                c.stepper = Some(c.stepper());
                c.approx = Some(ApproxSection::default());
            }
            Experiment::Periodize => c.periodize = Some(PeriodizeSection::default()),
            Experiment::Gamma => {
                c.stepper = Some(c.stepper());
                c.gamma = Some(GammaSection::default());
            }
            Experiment::Feasibility => c.feasibility = Some(FeasibilitySection::default()),
        }
        c
    }

    /// TOML, or JSON when the text starts with `{` (a report's `config` echo or a whole report).
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = if text.trim_start().starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
            let inner = v.get("config").cloned().unwrap_or(v);
            serde_json::from_value(inner).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let foreign = [
            (Experiment::Inflate, self.inflate.is_some()),
            (Experiment::Approx, self.approx.is_some()),
            (Experiment::Periodize, self.periodize.is_some()),
            (Experiment::Gamma, self.gamma.is_some()),
            (Experiment::Feasibility, self.feasibility.is_some()),
        ];
        for (e, present) in foreign {
            if present && e != self.experiment {
                return cfg_err(format!("section [{}] given for experiment {}", e.label(), self.experiment.label()));
            }
        }
        if self.scenario.is_some() && self.experiment != Experiment::Inflate {
            return cfg_err("[scenario] only applies to the inflate experiment");
        }
        let sweep = self.sweep_values();
        if self.experiment != Experiment::Feasibility && sweep.is_empty() {
            return cfg_err("sweep must be nonempty");
        }
        if sweep.iter().any(|v| !v.is_finite()) || sweep.windows(2).any(|w| w[1] <= w[0]) {
            return cfg_err("sweep values must be finite and strictly increasing");
        }
        if let Some(st) = &self.stepper {
            st.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        match self.experiment {
            Experiment::Inflate => {
                let sc = self.scenario();
                sc.validate().map_err(|e| Error::Config(e.to_string()))?;
                let sec = self.inflate_section();
                if sec.data == DataKind::TwoBlock {
                    if !matches!(sc.regime, Regime::CritHalf | Regime::NegativeS | Regime::FracCrit) {
                        return cfg_err(format!("regime {} has no two-block data", sc.regime.label()));
                    }
                    if sweep.iter().any(|&n| n < 2.0 || n.fract() != 0.0) {
                        return cfg_err("inflate sweep values are integers N >= 2");
                    }
                }
                if sec.steps == 0 || sec.output_factor == 0 || !(sec.surrogate_period >= 1.0) || !(sec.budget_factor > 0.0) {
                    return cfg_err("inflate: steps, output_factor must be >= 1, surrogate_period >= 1, budget_factor > 0");
                }
                if sec.methods.is_empty() {
                    return cfg_err("inflate: at least one method");
                }
            }
            Experiment::Approx => {
                let a = self.approx_section();
                if sweep.iter().any(|&d| d < 0.0) {
                    return cfg_err("approx sweep values are dispersion sizes delta >= 0");
                }
                if a.periods.is_empty() || a.times.is_empty() || a.times.iter().any(|&t| !(t > 0.0)) || !(a.mode_factor > 0.0) {
                    return cfg_err("approx: periods and positive times required");
                }
            }
            Experiment::Periodize => {
                if sweep.iter().any(|&l| !(l >= 1.0)) {
                    return cfg_err("periodize sweep values are periods L >= 1");
                }
            }
            Experiment::Gamma => {
                let g = self.gamma_section();
                if sweep.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
                    return cfg_err("gamma sweep values are deltas in (0, 1)");
                }
                if g.j == 0 || !(g.time > 0.0) {
                    return cfg_err("gamma: j >= 1 and time > 0");
                }
            }
            Experiment::Feasibility => {
                let f = self.feasibility_section();
                if !(f.s < 0.0) || !(f.alpha > 0.0) || !(f.margin >= 1.0) {
                    return cfg_err("feasibility: s < 0, alpha > 0, margin >= 1");
                }
                if sweep.iter().any(|&n| !(n > 1.0)) {
                    return cfg_err("feasibility sweep values are N > 1");
                }
            }
        }
        Ok(())
    }

    fn default_sweep(&self) -> Vec<f64> {
        match self.experiment {
            Experiment::Inflate => vec![256.0, 512.0, 1024.0, 2048.0, 4096.0],
            Experiment::Approx => vec![0.025, 0.05, 0.1, 0.2],
            Experiment::Periodize => vec![8.0, 16.0, 32.0, 64.0],
            Experiment::Gamma => vec![0.05, 0.1, 0.2, 0.4],
            Experiment::Feasibility => vec![1e4, 1e6, 1e8, 1e10],
        }
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        self.sweep.as_ref().map(|s| s.values.clone()).unwrap_or_else(|| self.default_sweep())
    }

    pub fn scenario(&self) -> InflationScenario {
        self.scenario.unwrap_or(InflationScenario { regime: Regime::CritHalf, s: -0.5, alpha: 1.0, theta: 0.0 })
    }

    pub fn stepper(&self) -> StepperConfig {
        self.stepper.unwrap_or(match self.experiment {
            Experiment::Approx | Experiment::Gamma => StepperConfig { dt: 5e-4, method: Method::SplitStep, grid_oversample: 3 },
            _ => StepperConfig::default(),
        })
    }

    pub fn inflate_section(&self) -> InflateSection {
        self.inflate.clone().unwrap_or_default()
    }

    pub fn approx_section(&self) -> ApproxSection {
        self.approx.clone().unwrap_or_default()
    }

    pub fn periodize_section(&self) -> PeriodizeSection {
        self.periodize.clone().unwrap_or_default()
    }

    pub fn gamma_section(&self) -> GammaSection {
        self.gamma.clone().unwrap_or_default()
    }

    pub fn feasibility_section(&self) -> FeasibilitySection {
        self.feasibility.clone().unwrap_or_default()
    }
}
