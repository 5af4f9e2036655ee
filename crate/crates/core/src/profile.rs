//! Compactly supported profiles on ℝ, their Fourier transforms and periodization.

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_breaks, DEFAULT_ATOL};
use crate::spectral::SpectralField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// ∫_{-1}^{1} e^{-1/(1-x²)} dx.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_3;

/// Unnormalized bump e^{-1/(1-x²)} on (−1, 1).
pub fn bump(x: f64) -> f64 {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Mollifier η: the bump normalized to unit mass.
pub fn mollifier(x: f64) -> f64 {
    bump(x) / BUMP_MASS
}

/// ∫_{-1}^{z} η.
pub fn mollifier_cdf(z: f64) -> f64 {
    if z <= -1.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return 1.0;
    }
    if z <= 0.0 {
        crate::quad::integrate_real(mollifier, &[-1.0, z], 1e-16)
    } else {
        1.0 - crate::quad::integrate_real(mollifier, &[z, 1.0], 1e-16)
    }
}

/// η̂(ζ) = ∫ η(x) e^{-2πiζx} dx (real, even).
pub fn mollifier_hat(zeta: f64) -> f64 {
    let z = zeta.abs();
    let pieces = (4.0 * z).ceil().max(2.0) as usize;
    let breaks: Vec<f64> = (0..=pieces).map(|i| i as f64 / pieces as f64).collect();
    2.0 * crate::quad::integrate_real(|x| mollifier(x) * (2.0 * PI * z * x).cos(), &breaks, 1e-15)
}

/// Coefficients of P_k with η^{(k)} = η·P_k/(1−x²)^{2k}, lowest degree first.
pub fn bump_derivative_poly(k: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for j in 0..k {
        // P_{j+1} = q²P' − 2xP + 4j·x·q·P, q = 1 − x²
        let deg = p.len() + 3;
        let mut next = vec![0.0; deg + 1];
        for (i, &a) in p.iter().enumerate().skip(1) {
            let d = a * i as f64;
            // q² = 1 − 2x² + x⁴ times d·x^{i−1}
            next[i - 1] += d;
            next[i + 1] -= 2.0 * d;
            next[i + 3] += d;
        }
        for (i, &a) in p.iter().enumerate() {
            next[i + 1] -= 2.0 * a;
            let c = 4.0 * j as f64 * a;
            next[i + 1] += c;
            next[i + 3] -= c;
        }
        while next.len() > 1 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        p = next;
    }
    p
}

/// η^{(k)} of the unnormalized bump from precomputed P_k.
fn bump_derivative_eval(poly: &[f64], k: usize, x: f64) -> f64 {
    let q = 1.0 - x * x;
    if q <= 0.0 {
        return 0.0;
    }
    let e = -1.0 / q;
    if e < -740.0 {
        return 0.0;
    }
    let p = poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
    if p == 0.0 {
        return 0.0;
    }
    let log = p.abs().ln() - 2.0 * k as f64 * q.ln() + e;
    p.signum() * log.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPiece {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// φ = ∂^κ f with f(x) = amplitude·bump(y)(1 + skew·y), y = (x − center)/width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpDerivative {
    pub kappa: usize,
    pub width: f64,
    pub skew: f64,
    pub amplitude: f64,
    pub center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Psi1,
    Psi2,
    Psi4,
    Mollified,
    Derivative,
    Steps,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Steps(Vec<StepPiece>),
    Mollified { pieces: Vec<StepPiece>, eps: f64 },
    Derivative { spec: BumpDerivative, polys: [Vec<f64>; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactProfile {
    kind: ProfileKind,
    shape: Shape,
    support_radius: f64,
}

fn check_pieces(pieces: &[StepPiece]) -> Result<()> {
    let mut sorted: Vec<_> = pieces.to_vec();
    sorted.sort_by(|p, q| p.a.total_cmp(&q.a));
    for p in &sorted {
        if !(p.a.is_finite() && p.b.is_finite() && p.a < p.b && p.value.is_finite()) {
            return invalid(format!("bad piece [{}, {}]", p.a, p.b));
        }
    }
    for w in sorted.windows(2) {
        if w[1].a < w[0].b {
            return invalid(format!("pieces [{}, {}] and [{}, {}] overlap", w[0].a, w[0].b, w[1].a, w[1].b));
        }
    }
    Ok(())
}

fn pieces_radius(pieces: &[StepPiece]) -> f64 {
    pieces.iter().map(|p| p.a.abs().max(p.b.abs())).fold(0.0, f64::max)
}

/// F[1_{[a,b]}](ξ).
pub fn step_transform(a: f64, b: f64, xi: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(b - a, 0.0);
    }
    let w = 2.0 * PI * xi;
    (Complex64::from_polar(1.0, -w * a) - Complex64::from_polar(1.0, -w * b)) / Complex64::new(0.0, w)
}

impl CompactProfile {
    pub fn steps(kind: ProfileKind, pieces: Vec<StepPiece>) -> Result<Self> {
        check_pieces(&pieces)?;
        let support_radius = pieces_radius(&pieces);
        Ok(CompactProfile { kind, shape: Shape::Steps(pieces), support_radius })
    }

    /// Step profile convolved with η_ε(x) = ε^{-1}η(x/ε).
    pub fn mollified(pieces: Vec<StepPiece>, eps: f64) -> Result<Self> {
        check_pieces(&pieces)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return invalid(format!("mollification width must be positive, got {eps}"));
        }
        let support_radius = pieces_radius(&pieces) + eps;
        Ok(CompactProfile { kind: ProfileKind::Mollified, shape: Shape::Mollified { pieces, eps }, support_radius })
    }

    pub fn bump_derivative(spec: BumpDerivative) -> Result<Self> {
        if !(spec.width > 0.0 && spec.width.is_finite()) {
            return invalid("bump width must be positive");
        }
        if spec.kappa == 0 {
            return invalid("derivative order must be >= 1");
        }
        let polys = [bump_derivative_poly(spec.kappa), bump_derivative_poly(spec.kappa - 1)];
        let support_radius = spec.center.abs() + spec.width;
        Ok(CompactProfile { kind: ProfileKind::Derivative, shape: Shape::Derivative { spec, polys }, support_radius })
    }

    pub fn zero() -> Self {
        CompactProfile { kind: ProfileKind::Steps, shape: Shape::Steps(Vec::new()), support_radius: 0.0 }
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Steps(p) | Shape::Mollified { pieces: p, .. } if p.is_empty() => (0.0, 0.0),
            Shape::Steps(p) => (p.iter().map(|q| q.a).fold(f64::MAX, f64::min), p.iter().map(|q| q.b).fold(f64::MIN, f64::max)),
            Shape::Mollified { pieces, eps } => {
                (pieces.iter().map(|q| q.a).fold(f64::MAX, f64::min) - eps, pieces.iter().map(|q| q.b).fold(f64::MIN, f64::max) + eps)
            }
            Shape::Derivative { spec, .. } => (spec.center - spec.width, spec.center + spec.width),
        }
    }

    /// Translate by `shift` (x ↦ f(x − shift)).
    pub fn translated(&self, shift: f64) -> Self {
        let mv = |p: &[StepPiece]| -> Vec<StepPiece> {
            p.iter().map(|q| StepPiece { a: q.a + shift, b: q.b + shift, value: q.value }).collect()
        };
        let shape = match &self.shape {
            Shape::Steps(p) => Shape::Steps(mv(p)),
            Shape::Mollified { pieces, eps } => Shape::Mollified { pieces: mv(pieces), eps: *eps },
            Shape::Derivative { spec, polys } => {
                let mut spec = spec.clone();
                spec.center += shift;
                Shape::Derivative { spec, polys: polys.clone() }
            }
        };
        let (a, b) = self.support();
        let support_radius = if a == b && a == 0.0 { 0.0 } else { (a + shift).abs().max((b + shift).abs()) };
        CompactProfile { kind: self.kind, shape, support_radius }
    }

    /// Translate so the support is symmetric about 0.
    pub fn centered(&self) -> Self {
        let (a, b) = self.support();
        self.translated(-0.5 * (a + b))
    }

    pub fn value(&self, x: f64) -> f64 {
        if x.abs() > self.support_radius {
            return 0.0;
        }
        match &self.shape {
            Shape::Steps(p) => p.iter().find(|q| q.a <= x && x < q.b).map_or(0.0, |q| q.value),
            Shape::Mollified { pieces, eps } => {
                pieces.iter().map(|q| q.value * (mollifier_cdf((x - q.a) / eps) - mollifier_cdf((x - q.b) / eps))).sum()
            }
            Shape::Derivative { spec, polys } => {
                let y = (x - spec.center) / spec.width;
                let k = spec.kappa;
                let d_k = bump_derivative_eval(&polys[0], k, y);
                let d_km1 = bump_derivative_eval(&polys[1], k - 1, y);
                spec.amplitude * spec.width.powi(-(k as i32)) * ((1.0 + spec.skew * y) * d_k + k as f64 * spec.skew * d_km1)
            }
        }
    }

    /// Points where the profile or its smoothness changes, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = match &self.shape {
            Shape::Steps(p) => p.iter().flat_map(|q| [q.a, q.b]).collect::<Vec<_>>(),
            Shape::Mollified { pieces, eps } => pieces.iter().flat_map(|q| [q.a - eps, q.a + eps, q.b - eps, q.b + eps]).collect(),
            Shape::Derivative { spec, .. } => (0..=16).map(|i| spec.center - spec.width + spec.width * i as f64 / 8.0).collect(),
        };
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// ∫ g(x, φ(x)) dx by adaptive Gauss–Kronrod over the breakpoints.
    pub fn integrate<G: Fn(f64, f64) -> Complex64>(&self, g: G, extra_splits: usize, atol: f64) -> Complex64 {
        let base = self.breakpoints();
        if base.len() < 2 {
            return ZERO;
        }
        let mut breaks = Vec::new();
        for w in base.windows(2) {
            for i in 0..=extra_splits {
                breaks.push(w[0] + (w[1] - w[0]) * i as f64 / (extra_splits + 1) as f64);
            }
        }
        breaks.push(*base.last().unwrap());
        integrate_breaks(|x| g(x, self.value(x)), &breaks, atol).value
    }

    /// F[φ](ξ) = ∫ φ(x) e^{-2πiξx} dx.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        match &self.shape {
            Shape::Steps(p) => p.iter().map(|q| q.value * step_transform(q.a, q.b, xi)).sum(),
            Shape::Mollified { pieces, eps } => {
                let base: Complex64 = pieces.iter().map(|q| q.value * step_transform(q.a, q.b, xi)).sum();
                base * mollifier_hat(eps * xi)
            }
            Shape::Derivative { spec, .. } => {
                let splits = (4.0 * xi.abs() * spec.width / 8.0).ceil() as usize;
                self.integrate(|x, v| Complex64::from_polar(v, -2.0 * PI * xi * x), splits, DEFAULT_ATOL)
            }
        }
    }
}

pub fn profile_fourier(profile: &CompactProfile, xi: f64) -> Complex64 {
    profile.fourier(xi)
}

/// Coefficients f̂_L(n/L) = F[f](n/L)/L of the L-periodization, |n| ≤ M.
pub fn periodize(profile: &CompactProfile, period: f64, m: usize) -> Result<SpectralField> {
    let required = 2.0 * profile.support_radius();
    if period < required * (1.0 - 1e-12) {
        return Err(Error::PeriodTooShort { period, required });
    }
    SpectralField::from_fn(period, m, |n| profile.fourier(n as f64 / period) / period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::synthesize;

    fn psi1() -> CompactProfile {
        let r = PI.sqrt();
        CompactProfile::steps(
            ProfileKind::Psi1,
            vec![StepPiece { a: 1.0, b: 3.0, value: r }, StepPiece { a: 4.0, b: 5.0, value: -2.0 * r }],
        )
        .unwrap()
    }

    #[test]
    fn bump_mass_normalizes() {
        let z = crate::quad::integrate_real(bump, &[-1.0, 0.0, 1.0], 1e-16);
        assert!((z - BUMP_MASS).abs() < 1e-15);
        assert!((mollifier_cdf(0.0) - 0.5).abs() < 1e-14);
        assert!((mollifier_hat(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_polys_match_finite_differences() {
        for k in 1..=4 {
            let p = bump_derivative_poly(k);
            let q = bump_derivative_poly(k - 1);
            for &x in &[-0.7, -0.2, 0.1, 0.55] {
                let h = 1e-5;
                let fd = (bump_derivative_eval(&q, k - 1, x + h) - bump_derivative_eval(&q, k - 1, x - h)) / (2.0 * h);
                let exact = bump_derivative_eval(&p, k, x);
                assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "k={k} x={x}");
            }
        }
        assert_eq!(bump_derivative_poly(1), vec![0.0, -2.0]);
    }

    #[test]
    fn zero_profile() {
        let z = CompactProfile::zero();
        assert_eq!(z.value(0.3), 0.0);
        assert_eq!(z.fourier(1.3), ZERO);
        let f = periodize(&z, 4.0, 5).unwrap();
        assert!(f.coeffs().iter().all(|c| *c == ZERO));
    }

    #[test]
    fn outside_support_is_zero() {
        let p = psi1();
        assert_eq!(p.support_radius(), 5.0);
        assert_eq!(p.value(5.5), 0.0);
        assert_eq!(p.value(-2.0), 0.0);
        assert!(CompactProfile::steps(
            ProfileKind::Steps,
            vec![StepPiece { a: 0.0, b: 2.0, value: 1.0 }, StepPiece { a: 1.0, b: 3.0, value: 1.0 }]
        )
        .is_err());
    }

    #[test]
    fn transform_examples() {
        let ind = CompactProfile::steps(ProfileKind::Steps, vec![StepPiece { a: 0.0, b: 1.0, value: 1.0 }]).unwrap();
        assert!(ind.fourier(1.0).norm() < 1e-15);
        assert!((ind.fourier(0.0) - 1.0).norm() < 1e-15);
        assert!(psi1().fourier(0.0).norm() < 1e-14);
    }

    #[test]
    fn indicator_periodization_is_sinc() {
        let ind = CompactProfile::steps(ProfileKind::Steps, vec![StepPiece { a: -0.5, b: 0.5, value: 1.0 }]).unwrap();
        let f = periodize(&ind, 2.0, 9).unwrap();
        for (n, c) in f.modes() {
            let want = if n == 0 { 0.5 } else { 0.5 * (PI * n as f64 / 2.0).sin() / (PI * n as f64 / 2.0) };
            assert!((c - want).norm() < 1e-15, "n={n}");
        }
        assert!(matches!(periodize(&psi1(), 9.0, 4), Err(Error::PeriodTooShort { .. })));
    }

    #[test]
    fn psi1_periodization_matches_pointwise() {
        let p = psi1();
        let l = 16.0;
        let m = 4096;
        let f = periodize(&p, l, m).unwrap();
        let g = 4 * 4096;
        let s = synthesize(&f, g).unwrap();
        // truncated Fourier series of a step: compare away from jumps
        let mut worst = 0.0f64;
        for (j, z) in s.iter().enumerate() {
            let x = j as f64 * l / g as f64 - l / 2.0;
            let near = p.breakpoints().iter().any(|b| (x - b).abs() < 0.1);
            if !near {
                worst = worst.max((z.re - p.value(x)).abs()).max(z.im.abs());
            }
        }
        assert!(worst < 2e-2, "{worst}");
    }

    #[test]
    fn mollified_transform_matches_quadrature() {
        let r = PI.sqrt();
        let p = CompactProfile::mollified(vec![StepPiece { a: 1.0, b: 3.0, value: r }, StepPiece { a: 4.0, b: 5.0, value: -2.0 * r }], 0.1)
            .unwrap();
        for &xi in &[0.0, 0.37, 1.9, 4.2] {
            let q = p.integrate(|x, v| Complex64::from_polar(v, -2.0 * PI * xi * x), 8, 1e-13);
            assert!((q - p.fourier(xi)).norm() < 1e-10, "xi={xi}");
        }
    }

    #[test]
    fn derivative_transform_is_derivative_symbol() {
        let p = CompactProfile::bump_derivative(BumpDerivative { kappa: 1, width: 1.0, skew: 0.0, amplitude: 1.0, center: 0.0 }).unwrap();
        // F[f'](ξ) = 2πiξ F[f](ξ), F[bump](ξ) = BUMP_MASS·η̂(ξ)
        for &xi in &[0.2, 0.8, 2.5] {
            let want = Complex64::new(0.0, 2.0 * PI * xi) * (BUMP_MASS * mollifier_hat(xi));
            assert!((p.fourier(xi) - want).norm() < 1e-11);
        }
    }

    #[test]
    fn centering_preserves_modulus() {
        let p = psi1();
        let c = p.centered();
        assert_eq!(c.support(), (-2.0, 2.0));
        assert_eq!(c.support_radius(), 2.0);
        for &xi in &[0.1, 0.9, 3.3] {
            assert!((p.fourier(xi).norm() - c.fourier(xi).norm()).abs() < 1e-13);
        }
    }
}
