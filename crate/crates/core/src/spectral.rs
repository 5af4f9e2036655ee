//! Truncated Fourier series on the scaled torus T_L = ℝ/Lℤ.
//!
//! Coefficient `n` holds f̂(n/L) = (1/L)∫ f(x) e^{-2πi n x/L} dx and
//! f(x) = Σ_n f̂(n/L) e^{2πi n x/L}. Grids sample x_j = jL/G − L/2.

use crate::error::{invalid, Error, Result};
use crate::fft;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    period: f64,
    coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    pub p: f64,
    pub homogeneous: bool,
}

impl NormSpec {
    pub fn sobolev(s: f64) -> Self {
        NormSpec { s, p: 2.0, homogeneous: false }
    }

    pub fn homogeneous(s: f64) -> Self {
        NormSpec { s, p: 2.0, homogeneous: true }
    }

    pub fn lebesgue(s: f64, p: f64) -> Self {
        NormSpec { s, p, homogeneous: false }
    }
}

fn check_period(period: f64) -> Result<()> {
    if !(period.is_finite() && period >= 1.0) {
        return invalid(format!("period must be finite and >= 1, got {period}"));
    }
    Ok(())
}

fn sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SpectralField {
    pub fn zeros(period: f64, m: usize) -> Result<Self> {
        check_period(period)?;
        if m == 0 {
            return invalid("truncation half-width M must be >= 1");
        }
        Ok(SpectralField { period, coeffs: vec![ZERO; 2 * m + 1] })
    }

    /// Coefficients ordered from mode −M to M.
    pub fn from_coeffs(period: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        check_period(period)?;
        if coeffs.len() < 3 || coeffs.len() % 2 == 0 {
            return invalid(format!("need 2M+1 coefficients with M >= 1, got {}", coeffs.len()));
        }
        Ok(SpectralField { period, coeffs })
    }

    pub fn from_fn(period: f64, m: usize, mut f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        let mut out = Self::zeros(period, m)?;
        let mi = m as i64;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            *c = f(i as i64 - mi);
        }
        Ok(out)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn half_width(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let m = self.half_width() as i64;
        if n.abs() > m {
            ZERO
        } else {
            self.coeffs[(n + m) as usize]
        }
    }

    pub fn set(&mut self, n: i64, value: Complex64) -> Result<()> {
        let m = self.half_width() as i64;
        if n.abs() > m {
            return invalid(format!("mode {n} outside [-{m}, {m}]"));
        }
        self.coeffs[(n + m) as usize] = value;
        Ok(())
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.half_width() as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - m, *c))
    }

    /// Zero-pads or truncates to half-width `m`.
    pub fn resized(&self, m: usize) -> Result<Self> {
        let mut out = Self::zeros(self.period, m)?;
        let mi = m as i64;
        for (n, c) in self.modes() {
            if n.abs() <= mi {
                out.coeffs[(n + mi) as usize] = c;
            }
        }
        Ok(out)
    }

    /// Same mode coefficients on a different period.
    pub fn with_period(&self, period: f64) -> Result<Self> {
        check_period(period)?;
        Ok(SpectralField { period, coeffs: self.coeffs.clone() })
    }

    pub fn map_modes(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let m = self.half_width() as i64;
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| f(i as i64 - m, *c)).collect();
        SpectralField { period: self.period, coeffs }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map_modes(|_, c| a * c)
    }

    /// `self − other` on the wider of the two truncations.
    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    fn combine(&self, other: &SpectralField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if (self.period - other.period).abs() > 1e-12 * self.period {
            return invalid(format!("period mismatch {} vs {}", self.period, other.period));
        }
        let m = self.half_width().max(other.half_width());
        SpectralField::from_fn(self.period, m, |n| f(self.coeff(n), other.coeff(n)))
    }

    /// Largest mode with a nonzero coefficient (0 for the zero field).
    pub fn support_width(&self) -> usize {
        self.modes().filter(|(_, c)| *c != ZERO).map(|(n, _)| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn l2_sq_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Samples Σ f̂(n/L) e^{2πi n x_j/L} on `grid_size` points.
pub fn synthesize(field: &SpectralField, grid_size: usize) -> Result<Vec<Complex64>> {
    let modes = field.coeffs.len();
    if grid_size < modes {
        return Err(Error::GridTooSmall { grid: grid_size, modes });
    }
    let g = grid_size as i64;
    let mut buf = vec![ZERO; grid_size];
    for (n, c) in field.modes() {
        buf[n.rem_euclid(g) as usize] = c * sign(n);
    }
    fft::inverse(&mut buf);
    Ok(buf)
}

/// Coefficients |n| ≤ M from samples on the grid x_j = jL/G − L/2.
pub fn analyze_to(samples: &[Complex64], period: f64, m: usize) -> Result<SpectralField> {
    if samples.is_empty() {
        return invalid("empty sample grid");
    }
    let g = samples.len();
    if g < 2 * m + 1 {
        return Err(Error::GridTooSmall { grid: g, modes: 2 * m + 1 });
    }
    let mut buf = samples.to_vec();
    fft::forward(&mut buf);
    let inv = 1.0 / g as f64;
    let gi = g as i64;
    SpectralField::from_fn(period, m, |n| buf[n.rem_euclid(gi) as usize] * (inv * sign(n)))
}

/// Full analysis: keeps every resolvable mode, M = (G−1)/2.
pub fn analyze(samples: &[Complex64], period: f64) -> Result<SpectralField> {
    if samples.len() < 3 {
        return invalid("sample grid needs at least 3 points");
    }
    analyze_to(samples, period, (samples.len() - 1) / 2)
}

fn bracket(xi: f64) -> f64 {
    (1.0 + xi * xi).sqrt()
}

pub fn sobolev_norm(field: &SpectralField, spec: NormSpec) -> Result<f64> {
    if spec.p != 2.0 {
        return invalid("Sobolev norms are defined with p = 2");
    }
    let l = field.period;
    let mut acc = 0.0;
    for (n, c) in field.modes() {
        let xi = n as f64 / l;
        let w = if spec.homogeneous {
            if n == 0 {
                continue;
            }
            xi.abs().powf(2.0 * spec.s)
        } else {
            bracket(xi).powf(2.0 * spec.s)
        };
        acc += w * c.norm_sqr();
    }
    Ok((l * acc).sqrt())
}

/// Norm of P_{<n_max} f.
pub fn sobolev_norm_below(field: &SpectralField, spec: NormSpec, n_max: u64) -> Result<f64> {
    sobolev_norm(&project_below(field, n_max), spec)
}

pub fn fourier_lebesgue_norm(field: &SpectralField, s: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return invalid(format!("Lebesgue exponent must be in [1, inf], got {p}"));
    }
    let l = field.period;
    let weighted = field.modes().map(|(n, c)| {
        let w = if s == 0.0 { 1.0 } else { bracket(n as f64 / l).powf(s) };
        w * c.norm()
    });
    if p.is_infinite() {
        return Ok(weighted.fold(0.0, f64::max));
    }
    Ok(weighted.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// (f̂(0), ⨍|u|²dx).
pub fn mean_and_l2(field: &SpectralField) -> (Complex64, f64) {
    (field.coeff(0), field.l2_sq_sum())
}

pub fn project_below(field: &SpectralField, n: u64) -> SpectralField {
    field.map_modes(|k, c| if k.unsigned_abs() < n { c } else { ZERO })
}

/// Grid used for an exactly dealiased cubic product of a half-width `m` field.
pub fn cubic_grid(m: usize) -> usize {
    fft::next_pow2(6 * m + 2)
}

/// |u|²u, or (|u|² − 2⨍|u|²)u when `wick`, truncated to the input's modes.
pub fn cubic_density(field: &SpectralField, wick: bool) -> Result<SpectralField> {
    let m = field.half_width();
    let g = cubic_grid(m);
    let mut u = synthesize(field, g)?;
    let mu = if wick { 2.0 * field.l2_sq_sum() } else { 0.0 };
    for z in u.iter_mut() {
        *z *= z.norm_sqr() - mu;
    }
    analyze_to(&u, field.period, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(seed: u64, period: f64, m: usize) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_fn(period, m, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
    }

    fn brute_cubic(f: &SpectralField) -> SpectralField {
        let m = f.half_width() as i64;
        SpectralField::from_fn(f.period(), m as usize, |n| {
            let mut acc = ZERO;
            for n1 in -m..=m {
                for n2 in -m..=m {
                    let n3 = n - n1 + n2;
                    if n3.abs() <= m {
                        acc += f.coeff(n1) * f.coeff(n2).conj() * f.coeff(n3);
                    }
                }
            }
            acc
        })
        .unwrap()
    }

    #[test]
    fn invariants_enforced() {
        assert!(SpectralField::zeros(0.5, 4).is_err());
        assert!(SpectralField::zeros(1.0, 0).is_err());
        assert!(SpectralField::from_coeffs(1.0, vec![ZERO; 4]).is_err());
        let f = SpectralField::zeros(3.0, 5).unwrap();
        assert_eq!(f.coeffs().len(), 11);
    }

    #[test]
    fn constant_mode_synthesizes_flat() {
        let mut f = SpectralField::zeros(3.7, 4).unwrap();
        f.set(0, c(1.0, 0.0)).unwrap();
        for z in synthesize(&f, 16).unwrap() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_exponential_samples() {
        let mut f = SpectralField::zeros(2.0, 1).unwrap();
        f.set(1, c(1.0, 0.0)).unwrap();
        // x_j = 2j/8 − 1: x = 0 at j = 4, x = 1/2 at j = 6
        let s = synthesize(&f, 8).unwrap();
        assert!((s[4] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((s[6] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn grid_too_small_refused() {
        let f = SpectralField::zeros(1.0, 4).unwrap();
        assert!(matches!(synthesize(&f, 8), Err(Error::GridTooSmall { .. })));
        assert!(analyze(&[], 1.0).is_err());
    }

    #[test]
    fn analyze_trivial() {
        let f = analyze(&vec![c(2.5, -1.0); 9], 5.0).unwrap();
        assert!((f.coeff(0) - c(2.5, -1.0)).norm() < 1e-15);
        assert!(f.modes().filter(|(n, _)| *n != 0).all(|(_, z)| z.norm() < 1e-15));
        let l = 3.0;
        let g = 12;
        let pts: Vec<_> = (0..g)
            .map(|j| {
                let x = j as f64 * l / g as f64 - l / 2.0;
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x / l)
            })
            .collect();
        let f = analyze(&pts, l).unwrap();
        for (n, z) in f.modes() {
            let want = if n == 1 { 1.0 } else { 0.0 };
            assert!((z - c(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn analyze_matches_direct_quadrature() {
        let f = random_field(11, 2.5, 6);
        let g = 64;
        let s = synthesize(&f, g).unwrap();
        let l = f.period();
        for n in -6i64..=6 {
            let mut acc = ZERO;
            for (j, z) in s.iter().enumerate() {
                let x = j as f64 * l / g as f64 - l / 2.0;
                acc += z * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * n as f64 * x / l);
            }
            acc /= g as f64;
            assert!((acc - f.coeff(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn sobolev_examples() {
        let mut f = SpectralField::zeros(1.0, 3).unwrap();
        f.set(0, c(1.0, 0.0)).unwrap();
        assert!((sobolev_norm(&f, NormSpec::sobolev(-3.3)).unwrap() - 1.0).abs() < 1e-15);
        let mut g = SpectralField::zeros(4.0, 10).unwrap();
        g.set(8, c(1.0, 0.0)).unwrap();
        let v = sobolev_norm(&g, NormSpec::sobolev(-1.0)).unwrap();
        assert!((v - 0.894_427_190_999_915_9).abs() < 1e-14);
        assert!(sobolev_norm(&g, NormSpec { s: 0.0, p: 1.0, homogeneous: false }).is_err());
        let z = SpectralField::zeros(2.0, 3).unwrap();
        assert_eq!(sobolev_norm(&z, NormSpec::homogeneous(-0.5)).unwrap(), 0.0);
    }

    #[test]
    fn plancherel_against_quadrature() {
        let f = random_field(5, 7.0, 12);
        let g = 128;
        let s = synthesize(&f, g).unwrap();
        let l = f.period();
        let quad: f64 = s.iter().map(|z| z.norm_sqr()).sum::<f64>() * l / g as f64;
        let norm = sobolev_norm(&f, NormSpec::sobolev(0.0)).unwrap();
        assert!((norm - quad.sqrt()).abs() < 1e-10);
        let (_, avg) = mean_and_l2(&f);
        assert!((avg - quad / l).abs() < 1e-12 * avg.max(1.0));
    }

    #[test]
    fn fourier_lebesgue_examples() {
        let mut f = SpectralField::zeros(1.0, 2).unwrap();
        f.set(0, c(3.0, 0.0)).unwrap();
        assert!((fourier_lebesgue_norm(&f, 1.7, 1.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(fourier_lebesgue_norm(&f, 0.0, 0.5).is_err());
        let g = random_field(2, 1.0, 5);
        let sup = g.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_eq!(fourier_lebesgue_norm(&g, 0.0, f64::INFINITY).unwrap(), sup);
        let l2 = fourier_lebesgue_norm(&g, 0.0, 2.0).unwrap();
        assert!((l2 - g.l2_sq_sum().sqrt()).abs() < 1e-13);
    }

    #[test]
    fn mean_and_l2_trivial() {
        let z = SpectralField::zeros(1.0, 3).unwrap();
        assert_eq!(mean_and_l2(&z), (ZERO, 0.0));
        let mut f = z.clone();
        f.set(0, c(1.0, -2.0)).unwrap();
        assert_eq!(mean_and_l2(&f), (c(1.0, -2.0), 5.0));
    }

    #[test]
    fn projection_trivial() {
        let f = random_field(3, 2.0, 6);
        assert_eq!(project_below(&f, 7), f);
        let p = project_below(&f, 1);
        assert_eq!(p.coeff(0), f.coeff(0));
        assert!(p.modes().filter(|(n, _)| *n != 0).all(|(_, z)| z == ZERO));
        assert_eq!(p.half_width(), f.half_width());
    }

    #[test]
    fn cubic_trivial_cases() {
        let mut f = SpectralField::zeros(1.0, 4).unwrap();
        let a = c(0.6, -0.8) * 1.5;
        f.set(0, a).unwrap();
        let plain = cubic_density(&f, false).unwrap();
        let wick = cubic_density(&f, true).unwrap();
        assert!((plain.coeff(0) - a * a.norm_sqr()).norm() < 1e-14);
        assert!((wick.coeff(0) + a * a.norm_sqr()).norm() < 1e-14);
        let mut g = SpectralField::zeros(2.0, 4).unwrap();
        g.set(3, a).unwrap();
        let out = cubic_density(&g, false).unwrap();
        for (n, z) in out.modes() {
            let want = if n == 3 { a * a.norm_sqr() } else { ZERO };
            assert!((z - want).norm() < 1e-14);
        }
    }

    #[test]
    fn cubic_matches_triple_sum() {
        for m in [1usize, 2, 5, 8, 16] {
            let f = random_field(100 + m as u64, 1.5, m);
            let fast = cubic_density(&f, false).unwrap();
            let slow = brute_cubic(&f);
            let err = fast.sub(&slow).unwrap().coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "M={m} err={err}");
            let wick = cubic_density(&f, true).unwrap();
            let mu = 2.0 * f.l2_sq_sum();
            let want = slow.sub(&f.scale(c(mu, 0.0))).unwrap();
            let err = wick.sub(&want).unwrap().coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn embedding_constant_uniform_in_period() {
        let mut consts = Vec::new();
        for l in [1.0, 4.0, 16.0, 64.0, 256.0].iter() {
            // a fixed real-line shape sampled on each torus
            let m = (8.0 * l) as usize;
            let f = SpectralField::from_fn(*l, m, |n| {
                let xi = n as f64 / l;
                c((-xi * xi).exp() / l, 0.0)
            })
            .unwrap();
            let sup = synthesize(&f, fft::next_pow2(4 * m + 1)).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
            consts.push(sup / sobolev_norm(&f, NormSpec::sobolev(1.0)).unwrap());
        }
        let (lo, hi) = consts.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo <= 2.0, "{consts:?}");
    }

    #[test]
    fn inhomogeneous_below_homogeneous_for_mean_zero() {
        let mut f = random_field(9, 3.0, 10);
        f.set(0, ZERO).unwrap();
        for s in [-2.0, -1.0, -0.5, 0.0] {
            let inh = sobolev_norm(&f, NormSpec::sobolev(s)).unwrap();
            let hom = sobolev_norm(&f, NormSpec::homogeneous(s)).unwrap();
            assert!(inh <= hom * (1.0 + 1e-14));
        }
    }

    proptest! {
        #[test]
        fn round_trip(seed in 0u64..10_000, m in 1usize..24, extra in 0usize..40, l in 1.0f64..50.0) {
            let f = random_field(seed, l, m);
            let s = synthesize(&f, 2 * m + 1 + extra).unwrap();
            let back = analyze_to(&s, l, m).unwrap();
            let err = back.sub(&f).unwrap().coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-12);
        }

        #[test]
        fn projection_contracts(seed in 0u64..10_000, m in 1usize..20, n in 0u64..25, s in -3.0f64..3.0) {
            let f = random_field(seed, 2.0, m);
            let spec = NormSpec::sobolev(s);
            prop_assert!(sobolev_norm(&project_below(&f, n), spec).unwrap() <= sobolev_norm(&f, spec).unwrap() * (1.0 + 1e-14));
        }
    }
}
