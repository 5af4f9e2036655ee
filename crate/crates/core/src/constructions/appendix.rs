//! Step profiles ψ₁, ψ₂, ψ₄, their mollifications and bump derivatives.

use crate::error::{invalid, Error, Result};
use crate::profile::{BumpDerivative, CompactProfile, ProfileKind, Shape, StepPiece};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const DEFAULT_EPS: f64 = 0.1;

/// Width-4 skewed bump; the amplitude sign is chosen so that ∫φ⁵ < 0.
pub fn default_derivative(kappa: usize) -> BumpDerivative {
    let spec = BumpDerivative { kappa, width: 4.0, skew: 0.3, amplitude: 4.0, center: 0.0 };
    match CompactProfile::bump_derivative(spec.clone()) {
        Ok(p) if fifth_moment(&p) > 0.0 => BumpDerivative { amplitude: -4.0, ..spec },
        _ => spec,
    }
}

fn fifth_moment(p: &CompactProfile) -> f64 {
    p.integrate(|_, v| Complex64::new(v.powi(5), 0.0), 4, 1e-13).re
}

fn psi1_pieces() -> Vec<StepPiece> {
    let r = PI.sqrt();
    vec![StepPiece { a: 1.0, b: 3.0, value: r }, StepPiece { a: 4.0, b: 5.0, value: -2.0 * r }]
}

fn mirrored(half: Vec<StepPiece>) -> Vec<StepPiece> {
    let mut out: Vec<StepPiece> = half.iter().map(|p| StepPiece { a: -p.b, b: -p.a, value: p.value }).collect();
    out.reverse();
    out.extend(half);
    out
}

fn psi2_pieces() -> Vec<StepPiece> {
    mirrored(psi1_pieces())
}

fn psi4_pieces(a: f64) -> Vec<StepPiece> {
    let r = PI.sqrt();
    mirrored(vec![
        StepPiece { a: 1.0, b: 2.0, value: r },
        StepPiece { a: 4.0, b: 5.0, value: -2.0 * r },
        StepPiece { a, b: a + 1.0, value: r },
    ])
}

/// ∫ x^j over the pieces, exactly.
pub fn step_moment(pieces: &[StepPiece], j: u32) -> f64 {
    let e = j as i32 + 1;
    pieces.iter().map(|p| p.value * (p.b.powi(e) - p.a.powi(e)) / e as f64).sum()
}

/// F(a) = ∫x²ψ₄(x; a) dx.
pub fn psi4_second_moment(a: f64) -> f64 {
    step_moment(&psi4_pieces(a), 2)
}

/// Root a* ∈ (5, 10) of F by bisection.
pub fn solve_psi4_parameter() -> f64 {
    let (mut lo, mut hi) = (5.0f64, 10.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-15 {
            return mid;
        }
        if psi4_second_moment(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

pub fn psi4_profile(a: f64) -> Result<CompactProfile> {
    if !(a > 5.0) {
        return invalid(format!("psi4 parameter must exceed 5, got {a}"));
    }
    CompactProfile::steps(ProfileKind::Psi4, psi4_pieces(a))
}

pub fn step_base(kind: ProfileKind) -> Result<Vec<StepPiece>> {
    match kind {
        ProfileKind::Psi1 => Ok(psi1_pieces()),
        ProfileKind::Psi2 => Ok(psi2_pieces()),
        ProfileKind::Psi4 => Ok(psi4_pieces(solve_psi4_parameter())),
        other => invalid(format!("{other:?} is not a step base")),
    }
}

fn base_for_moments(kappa: usize) -> ProfileKind {
    match kappa {
        0 | 1 => ProfileKind::Psi1,
        2 => ProfileKind::Psi2,
        _ => ProfileKind::Psi4,
    }
}

/// Step base mollified by η_ε.
pub fn mollified_profile(base: ProfileKind, eps: f64) -> Result<CompactProfile> {
    CompactProfile::mollified(step_base(base)?, eps)
}

/// ∂^κ of a skewed bump; refuses when ∫φ⁵ ≥ 0.
pub fn derivative_profile(spec: BumpDerivative) -> Result<CompactProfile> {
    let p = CompactProfile::bump_derivative(spec)?;
    let fifth = fifth_moment(&p);
    if !(fifth < 0.0) {
        return Err(Error::Hypothesis(format!("integral of phi^5 is {fifth:e}, must be negative")));
    }
    Ok(p)
}

/// Profile of the given kind; `kappa` picks the step base for `Mollified` and the order for `Derivative`.
pub fn appendix_profile(kind: ProfileKind, kappa: usize) -> Result<CompactProfile> {
    match kind {
        ProfileKind::Psi1 | ProfileKind::Psi2 | ProfileKind::Psi4 => CompactProfile::steps(kind, step_base(kind)?),
        ProfileKind::Mollified => mollified_profile(base_for_moments(kappa), DEFAULT_EPS),
        ProfileKind::Derivative => {
            if kappa == 0 {
                return invalid("derivative profiles need kappa >= 1");
            }
            derivative_profile(default_derivative(kappa))
        }
        ProfileKind::Steps => invalid("generic step profiles are built with CompactProfile::steps"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    /// ∫x^j φ for j < κ.
    pub moments: Vec<f64>,
    pub max_moment: f64,
    /// (ξ, |φ̂(ξ)|/|ξ|^κ) for ξ = 0.01·2^{−i}.
    pub fourier_ratios: Vec<(f64, f64)>,
}

pub fn moment_vanishing(profile: &CompactProfile, kappa: usize) -> MomentReport {
    let moments: Vec<f64> = (0..kappa as u32)
        .map(|j| match profile.shape() {
            Shape::Steps(p) => step_moment(p, j),
            _ => {
                let (a, b) = profile.support();
                let c = 0.5 * (a + b);
                let shifted = profile.translated(-c);
                let central: Vec<f64> =
                    (0..=j).map(|i| shifted.integrate(|x, v| Complex64::new(v * x.powi(i as i32), 0.0), 4, 1e-14).re).collect();
                // ∫x^j φ(x) = Σ binom(j,i) c^{j−i} ∫y^i φ(y + c)
                let mut binom = 1.0;
                let mut acc = 0.0;
                for i in 0..=j {
                    acc += binom * c.powi((j - i) as i32) * central[i as usize];
                    binom = binom * (j - i) as f64 / (i + 1) as f64;
                }
                acc
            }
        })
        .collect();
    let max_moment = moments.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let fourier_ratios = (0..6)
        .map(|i| {
            let xi = 0.01 * 0.5f64.powi(i);
            (xi, profile.fourier(xi).norm() / xi.powi(kappa as i32))
        })
        .collect();
    MomentReport { moments, max_moment, fourier_ratios }
}

/// ∫φ(x)e^{i|φ(x)|²t₀}dx and its modulus.
pub fn phase_integral(profile: &CompactProfile, t0: f64) -> (Complex64, f64) {
    let z = match profile.shape() {
        Shape::Steps(p) => p.iter().map(|q| q.value * (q.b - q.a) * Complex64::from_polar(1.0, q.value * q.value * t0)).sum(),
        _ => profile.integrate(|_, v| v * Complex64::from_polar(1.0, v * v * t0), 8, 1e-12),
    };
    (z, z.norm())
}
