//! Time evolution: exact dispersionless flow, Strang split-step, integrating-factor
//! RK4, symmetry maps and the first Picard iterates in the interaction picture.

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::quad::gauss_legendre;
use crate::spectral::{cubic_density, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Oversampling of the grid used for the exact phase rotation.
pub const ODE_OVERSAMPLE: usize = 8;

/// Default number of triples a direct Duhamel sum may visit.
pub const PICARD_BUDGET: f64 = 2e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub alpha: f64,
    pub dispersion_coeff: f64,
    pub dispersion_sign: f64,
    pub wick: bool,
}

impl EquationSpec {
    /// i u_t − u_xx + |u|²u = 0.
    pub fn nls() -> Self {
        EquationSpec { alpha: 1.0, dispersion_coeff: 1.0, dispersion_sign: 1.0, wick: false }
    }

    /// Wick-ordered cubic NLS.
    pub fn wick_nls() -> Self {
        EquationSpec { wick: true, ..Self::nls() }
    }

    /// i u_t + (−∂²)^α u + |u|²u = 0.
    pub fn fractional(alpha: f64) -> Self {
        EquationSpec { alpha, ..Self::nls() }
    }

    /// Dispersion coefficient δ^{2α}.
    pub fn small_dispersion(delta: f64, alpha: f64) -> Self {
        EquationSpec { alpha, dispersion_coeff: delta.powf(2.0 * alpha), ..Self::nls() }
    }

    pub fn dispersionless(wick: bool) -> Self {
        EquationSpec { alpha: 1.0, dispersion_coeff: 0.0, dispersion_sign: 1.0, wick }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return invalid(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.dispersion_coeff >= 0.0 && self.dispersion_coeff.is_finite()) {
            return invalid(format!("dispersion coefficient must be >= 0, got {}", self.dispersion_coeff));
        }
        if self.dispersion_sign != 1.0 && self.dispersion_sign != -1.0 {
            return invalid("dispersion sign must be +1 or -1");
        }
        Ok(())
    }

    /// Linear frequency ω_n: the free flow multiplies mode n by e^{iω_n t}.
    pub fn frequency(&self, n: i64, period: f64) -> f64 {
        if self.dispersion_coeff == 0.0 || n == 0 {
            return 0.0;
        }
        self.dispersion_sign * self.dispersion_coeff * (2.0 * PI * n.unsigned_abs() as f64 / period).powf(2.0 * self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SplitStep,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    pub method: Method,
    pub grid_oversample: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig { dt: 1e-4, method: Method::SplitStep, grid_oversample: 3 }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if self.grid_oversample < 3 {
            return invalid(format!("grid_oversample must be >= 3, got {}", self.grid_oversample));
        }
        Ok(())
    }

    fn steps(&self, t: f64) -> usize {
        ((t / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Field plus the spectral mass ⨍|·|² discarded by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub field: SpectralField,
    pub tail_mass: f64,
    pub steps: usize,
}

/// Physical-space workspace for pointwise maps of a half-width `m` field.
///
/// Samples sit at x_j = jL/G; the half-period shift of `synthesize` is
/// irrelevant for pointwise maps and is skipped.
struct Grid {
    m: usize,
    buf: Vec<Complex64>,
}

impl Grid {
    fn new(m: usize, g: usize) -> Self {
        Grid { m, buf: vec![ZERO; g] }
    }

    fn load(&mut self, coeffs: &[Complex64]) {
        let g = self.buf.len() as i64;
        let m = self.m as i64;
        self.buf.iter_mut().for_each(|z| *z = ZERO);
        for (i, c) in coeffs.iter().enumerate() {
            self.buf[(i as i64 - m).rem_euclid(g) as usize] = *c;
        }
        fft::inverse(&mut self.buf);
    }

    /// Writes modes |n| ≤ m back and returns the discarded mass.
    fn store(&mut self, coeffs: &mut [Complex64]) -> f64 {
        fft::forward(&mut self.buf);
        let g = self.buf.len();
        let inv = 1.0 / g as f64;
        let m = self.m as i64;
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = self.buf[(i as i64 - m).rem_euclid(g as i64) as usize] * inv;
        }
        let lo = (self.m + 1).min(g);
        let hi = g.saturating_sub(self.m).max(lo);
        self.buf[lo..hi].iter().map(|z| z.norm_sqr()).sum::<f64>() * inv * inv
    }

    /// u ↦ u·e^{i(|u|² − μ)t} pointwise.
    fn rotate(&mut self, t: f64, mu: f64) {
        for z in self.buf.iter_mut() {
            let ph = (z.norm_sqr() - mu) * t;
            *z *= Complex64::new(ph.cos(), ph.sin());
        }
    }
}

fn wick_shift(field_mass: f64, wick: bool) -> f64 {
    if wick {
        2.0 * field_mass
    } else {
        0.0
    }
}

fn ode_on_grid(field: &SpectralField, t: f64, wick: bool, g: usize) -> Evolved {
    let mut out = field.clone();
    if t == 0.0 {
        return Evolved { field: out, tail_mass: 0.0, steps: 0 };
    }
    let mut grid = Grid::new(field.half_width(), g);
    grid.load(field.coeffs());
    grid.rotate(t, wick_shift(field.l2_sq_sum(), wick));
    let tail_mass = grid.store(out.coeffs_mut());
    Evolved { field: out, tail_mass, steps: 1 }
}

/// w = φ e^{i|φ|²t} (Wick: φ e^{i(|φ|² − 2⨍|φ|²)t}), truncated back to the input modes.
pub fn ode_exact_evolve(field: &SpectralField, t: f64, wick: bool) -> Result<Evolved> {
    if !t.is_finite() {
        return invalid("time must be finite");
    }
    let g = fft::next_pow2(ODE_OVERSAMPLE * (2 * field.half_width() + 1));
    Ok(ode_on_grid(field, t, wick, g))
}

fn propagator(field: &SpectralField, eq: &EquationSpec, tau: f64) -> Vec<Complex64> {
    field
        .modes()
        .map(|(n, _)| {
            let ph = eq.frequency(n, field.period()) * tau;
            Complex64::new(ph.cos(), ph.sin())
        })
        .collect()
}

fn apply(coeffs: &mut [Complex64], phases: &[Complex64]) {
    for (c, p) in coeffs.iter_mut().zip(phases) {
        *c *= p;
    }
}

fn check_time(t: f64, cfg: &StepperConfig) -> Result<()> {
    cfg.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("time must be finite and >= 0, got {t}"));
    }
    Ok(())
}

fn finite(c: &[Complex64]) -> bool {
    c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Strang splitting with exact linear half-steps and exact phase-rotation steps.
pub fn split_step_run(field: &SpectralField, eq: &EquationSpec, t: f64, cfg: &StepperConfig) -> Result<Evolved> {
    eq.validate()?;
    check_time(t, cfg)?;
    let g = fft::next_pow2(cfg.grid_oversample * (2 * field.half_width() + 1));
    if t == 0.0 {
        return Ok(Evolved { field: field.clone(), tail_mass: 0.0, steps: 0 });
    }
    if eq.dispersion_coeff == 0.0 {
        return Ok(ode_on_grid(field, t, eq.wick, g));
    }
    let n = cfg.steps(t);
    let dt = t / n as f64;
    let half = propagator(field, eq, 0.5 * dt);
    let full = propagator(field, eq, dt);
    let mut out = field.clone();
    let mut grid = Grid::new(field.half_width(), g);
    let mut tail = 0.0;
    apply(out.coeffs_mut(), &half);
    for step in 0..n {
        let mu = wick_shift(out.l2_sq_sum(), eq.wick);
        grid.load(out.coeffs());
        grid.rotate(dt, mu);
        tail += grid.store(out.coeffs_mut());
        apply(out.coeffs_mut(), if step + 1 == n { &half } else { &full });
        if !finite(out.coeffs()) {
            return Err(Error::BlowUp { t: (step + 1) as f64 * dt, step: step + 1 });
        }
    }
    Ok(Evolved { field: out, tail_mass: tail, steps: n })
}

pub fn split_step_evolve(field: &SpectralField, eq: &EquationSpec, t: f64, cfg: &StepperConfig) -> Result<SpectralField> {
    split_step_run(field, eq, t, cfg).map(|e| e.field)
}

/// i·P_M[(|u|² − 2μ·wick)u].
fn nonlinear_rhs(u: &SpectralField, wick: bool) -> Result<SpectralField> {
    Ok(cubic_density(u, wick)?.scale(I))
}

fn axpy(out: &mut SpectralField, a: f64, x: &SpectralField) {
    for (o, v) in out.coeffs_mut().iter_mut().zip(x.coeffs()) {
        *o += v * a;
    }
}

fn phased(u: &SpectralField, phases: &[Complex64]) -> SpectralField {
    let mut v = u.clone();
    apply(v.coeffs_mut(), phases);
    v
}

/// Fourth-order Runge–Kutta in the interaction picture (Lawson); with no
/// dispersion it is classical RK4 on the truncated system.
pub fn rk4_spectral_evolve(field: &SpectralField, eq: &EquationSpec, t: f64, cfg: &StepperConfig) -> Result<SpectralField> {
    eq.validate()?;
    check_time(t, cfg)?;
    if t == 0.0 {
        return Ok(field.clone());
    }
    let n = cfg.steps(t);
    let h = t / n as f64;
    let e_half = propagator(field, eq, 0.5 * h);
    let e_full = propagator(field, eq, h);
    let mut u = field.clone();
    for step in 0..n {
        let k1 = nonlinear_rhs(&u, eq.wick)?;
        let u_half = phased(&u, &e_half);
        let mut y = u.clone();
        axpy(&mut y, 0.5 * h, &k1);
        let k2 = nonlinear_rhs(&phased(&y, &e_half), eq.wick)?;
        let mut y = u_half.clone();
        axpy(&mut y, 0.5 * h, &k2);
        let k3 = nonlinear_rhs(&y, eq.wick)?;
        let mut y = phased(&u, &e_full);
        axpy(&mut y, h, &phased(&k3, &e_half));
        let k4 = nonlinear_rhs(&y, eq.wick)?;
        let mut next = phased(&u, &e_full);
        axpy(&mut next, h / 6.0, &phased(&k1, &e_full));
        let mut mid = k2;
        axpy(&mut mid, 1.0, &k3);
        axpy(&mut next, h / 3.0, &phased(&mid, &e_half));
        axpy(&mut next, h / 6.0, &k4);
        u = next;
        if !u.is_finite() {
            return Err(Error::BlowUp { t: (step + 1) as f64 * h, step: step + 1 });
        }
    }
    Ok(u)
}

/// Dispatches on `cfg.method`.
pub fn evolve(field: &SpectralField, eq: &EquationSpec, t: f64, cfg: &StepperConfig) -> Result<SpectralField> {
    match cfg.method {
        Method::SplitStep => split_step_evolve(field, eq, t, cfg),
        Method::Rk4 => rk4_spectral_evolve(field, eq, t, cfg),
    }
}

/// Multiplies mode n by e^{−it(2π|n|/L)^{2α}}.
pub fn interaction_picture(field: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let eq = EquationSpec::fractional(alpha);
    let l = field.period();
    field.map_modes(|n, c| {
        let ph = -eq.frequency(n, l) * t;
        c * Complex64::new(ph.cos(), ph.sin())
    })
}

/// |n|^{2α} − |n₁|^{2α} + |n₂|^{2α} − |n₃|^{2α}.
pub fn phase_weight(n: i64, n1: i64, n2: i64, n3: i64, alpha: f64) -> Result<f64> {
    if n != n1 - n2 + n3 {
        return invalid(format!("need n = n1 - n2 + n3, got {n} vs {}", n1 - n2 + n3));
    }
    let p = |k: i64| (k.unsigned_abs() as f64).powf(2.0 * alpha);
    Ok(p(n) - p(n1) + p(n2) - p(n3))
}

/// sin(y)/y.
fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// ∫₀ᵗ e^{−iΦt′} dt′, exactly t at Φ = 0.
pub fn duhamel_weight(phi: f64, t: f64) -> Complex64 {
    if phi == 0.0 {
        return Complex64::new(t, 0.0);
    }
    let h = 0.5 * phi * t;
    Complex64::new(h.cos(), -h.sin()) * (t * sinc(h))
}

/// ∫₀ᵗ (1 − e^{−iφt′}) dt′ = t − (1 − e^{−iφt})/(iφ).
pub fn oscillatory_integral(phi: f64, t: f64) -> Complex64 {
    if phi == 0.0 {
        return ZERO;
    }
    let x = phi * t;
    let re = if x.abs() < 1e-3 { x * x / 6.0 - x.powi(4) / 120.0 } else { 1.0 - x.sin() / x };
    let h = 0.5 * x;
    let im = if h == 0.0 { 0.0 } else { h.sin() * h.sin() / h };
    Complex64::new(re, im) * t
}

/// Maximal runs of consecutive modes with nonzero coefficient.
fn support_runs(field: &SpectralField) -> Vec<(i64, i64)> {
    let mut runs: Vec<(i64, i64)> = Vec::new();
    for (n, c) in field.modes() {
        if c == ZERO {
            continue;
        }
        match runs.last_mut() {
            Some((_, hi)) if *hi + 1 == n => *hi = n,
            _ => runs.push((n, n)),
        }
    }
    runs
}

fn support_size(runs: &[(i64, i64)]) -> f64 {
    runs.iter().map(|(a, b)| (b - a + 1) as f64).sum()
}

/// Σ_{n = n1 − n2 + n3} W(Φ, ·) a_{n1} conj(b_{n2}) c_{n3}, with W supplied per Φ.
fn duhamel_sum(
    a: &SpectralField,
    b: &SpectralField,
    c: &SpectralField,
    alpha: f64,
    m_out: usize,
    weight: &dyn Fn(f64) -> Complex64,
) -> SpectralField {
    let l = a.period();
    let scale = (2.0 * PI / l).powf(2.0 * alpha);
    let wmax = a.half_width().max(b.half_width()).max(c.half_width()) as i64 * 3;
    let pw: Vec<f64> = (0..=wmax).map(|k| (k as f64).powf(2.0 * alpha)).collect();
    let p = |k: i64| pw[k.unsigned_abs() as usize];
    let (ra, rb, rc) = (support_runs(a), support_runs(b), support_runs(c));
    let mut out = vec![ZERO; 2 * m_out + 1];
    let mo = m_out as i64;
    for &(a0, a1) in &ra {
        for n1 in a0..=a1 {
            let x1 = a.coeff(n1);
            for &(b0, b1) in &rb {
                for n2 in b0..=b1 {
                    let x12 = x1 * b.coeff(n2).conj();
                    let base = -p(n1) + p(n2);
                    for &(c0, c1) in &rc {
                        for n3 in c0..=c1 {
                            let n = n1 - n2 + n3;
                            if n.abs() > mo {
                                continue;
                            }
                            let phi = (p(n) + base - p(n3)) * scale;
                            out[(n + mo) as usize] += x12 * c.coeff(n3) * weight(phi);
                        }
                    }
                }
            }
        }
    }
    SpectralField::from_coeffs(l, out).expect("valid shape")
}

/// First (order 1) or second (order 2) Picard iterate of the interaction-picture
/// Duhamel formula at time t, by direct triple sums over the support.
pub fn picard_expansion(phi: &SpectralField, t: f64, alpha: f64, order: u8) -> Result<SpectralField> {
    picard_expansion_with_budget(phi, t, alpha, order, PICARD_BUDGET)
}

pub fn picard_expansion_with_budget(phi: &SpectralField, t: f64, alpha: f64, order: u8, budget: f64) -> Result<SpectralField> {
    if order != 1 && order != 2 {
        return invalid(format!("Picard order must be 1 or 2, got {order}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return invalid("time must be finite and >= 0");
    }
    let w = phi.support_width();
    let m1 = (3 * w).max(phi.half_width());
    let first_at = |s: f64| -> SpectralField {
        let sum = duhamel_sum(phi, phi, phi, alpha, m1, &|p| duhamel_weight(p, s));
        let mut out = phi.resized(m1).expect("valid");
        axpy_c(&mut out, I, &sum);
        out
    };
    let size = support_size(&support_runs(phi));
    if order == 1 {
        if size.powi(3) > budget {
            return Err(Error::Budget { what: "direct Duhamel triple sum", required: size.powi(3), limit: budget });
        }
        if t == 0.0 {
            return Ok(phi.clone());
        }
        return Ok(first_at(t));
    }
    // the first iterate is supported in [−3w, 3w]
    let m2 = (9 * w).max(phi.half_width());
    let l = phi.period();
    let phi_max = 4.0 * (2.0 * PI * (9 * w) as f64 / l).powf(2.0 * alpha);
    let nodes = ((phi_max * t / PI).ceil() as usize + 16).min(4096);
    let size1 = (6 * w + 1) as f64;
    let required = nodes as f64 * (size.powi(3) + size1.powi(3));
    if required > budget {
        return Err(Error::Budget { what: "second Picard iterate", required, limit: budget });
    }
    if t == 0.0 {
        return Ok(phi.clone());
    }
    let mut acc = phi.resized(m2)?;
    for (s, wgt) in gauss_legendre(nodes, 0.0, t) {
        let u1 = first_at(s);
        let sum = duhamel_sum(&u1, &u1, &u1, alpha, m2, &|p| {
            let ph = -p * s;
            Complex64::new(ph.cos(), ph.sin())
        });
        axpy_c(&mut acc, I * wgt, &sum);
    }
    Ok(acc)
}

fn axpy_c(out: &mut SpectralField, a: Complex64, x: &SpectralField) {
    let m = out.half_width() as i64;
    for (n, v) in x.modes() {
        if n.abs() <= m {
            out.coeffs_mut()[(n + m) as usize] += a * v;
        }
    }
}

/// Multiplies the field by e^{∓2it⨍|u|²}.
pub fn gauge_transform(field: &SpectralField, t: f64, inverse: bool) -> SpectralField {
    let sign = if inverse { 1.0 } else { -1.0 };
    let ph = sign * 2.0 * t * field.l2_sq_sum();
    field.scale(Complex64::new(ph.cos(), ph.sin()))
}

/// û(n) = λ^{−α} v̂(n/L) on T_1, for v on T_L with L = δ/λ.
pub fn scale_map(field: &SpectralField, lambda: f64, delta: f64, alpha: f64) -> Result<SpectralField> {
    if !(lambda > 0.0 && lambda <= delta) {
        return invalid(format!("need 0 < lambda <= delta, got lambda={lambda}, delta={delta}"));
    }
    let l = delta / lambda;
    if (field.period() - l).abs() > 1e-10 * l {
        return invalid(format!("field period {} does not match delta/lambda = {l}", field.period()));
    }
    let a = lambda.powf(-alpha);
    field.with_period(1.0).map(|f| f.scale(Complex64::new(a, 0.0)))
}

/// Galilean boost for i u_t − u_xx + |u|²u = 0: u^β(x,t) = e^{ipx}e^{ip²t}u(x + 2pt, t)
/// with p = 2πm/L and m = β/2, which shifts modes by m.
pub fn galilean_boost(field: &SpectralField, beta: i64, t: f64) -> Result<SpectralField> {
    if beta % 2 != 0 {
        return invalid(format!("boost parameter must be even, got {beta}"));
    }
    let m = beta / 2;
    let l = field.period();
    let p = 2.0 * PI * m as f64 / l;
    let v = 2.0 * p;
    let width = field.half_width() + m.unsigned_abs() as usize;
    SpectralField::from_fn(l, width, |n| {
        let k = n - m;
        let ph = p * p * t + 2.0 * PI * (k as f64 / l) * v * t;
        field.coeff(k) * Complex64::new(ph.cos(), ph.sin())
    })
}
