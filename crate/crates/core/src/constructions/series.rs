//! Power series Ξ_k(t) = (it)^k/k!·|φ|^{2k}φ of the dispersionless flow and its bounds.

use super::scenario::{f_factor, TwoBlock};
use crate::error::{invalid, Error, Result};
use crate::fft::next_pow2;
use crate::spectral::{analyze_to, fourier_lebesgue_norm, project_below, sobolev_norm, synthesize, NormSpec, SpectralField};
use num_complex::Complex64;

pub const XI_DEFAULT_KMAX: usize = 6;
/// Largest output half-width a Ξ_k computation may allocate.
pub const XI_MODE_BUDGET: usize = 1 << 21;

fn xi_half_width(phi: &SpectralField, k: usize) -> usize {
    (2 * k + 1) * phi.support_width()
}

/// Ξ_0..=Ξ_kmax, each exact on its own support |n| ≤ (2k+1)·W.
pub fn xi_series_with_budget(phi: &SpectralField, t: f64, kmax: usize, budget: usize) -> Result<Vec<SpectralField>> {
    let top = xi_half_width(phi, kmax).max(1);
    if top > budget {
        return Err(Error::Budget { what: "xi_term half-width", required: top as f64, limit: budget as f64 });
    }
    let g = next_pow2(2 * top + 1);
    let u = synthesize(&phi.resized(phi.support_width().max(1))?, g)?;
    let dens: Vec<f64> = u.iter().map(|z| z.norm_sqr()).collect();
    let mut out = Vec::with_capacity(kmax + 1);
    let mut pow = u.clone();
    let mut factor = Complex64::new(1.0, 0.0);
    for k in 0..=kmax {
        if k > 0 {
            for (p, d) in pow.iter_mut().zip(&dens) {
                *p *= *d;
            }
            factor *= Complex64::new(0.0, t / k as f64);
        }
        let scaled: Vec<Complex64> = pow.iter().map(|z| z * factor).collect();
        out.push(analyze_to(&scaled, phi.period(), xi_half_width(phi, k).max(1))?);
    }
    Ok(out)
}

pub fn xi_series(phi: &SpectralField, t: f64, kmax: usize) -> Result<Vec<SpectralField>> {
    xi_series_with_budget(phi, t, kmax, XI_MODE_BUDGET)
}

pub fn xi_term(phi: &SpectralField, k: usize, t: f64) -> Result<SpectralField> {
    if k == 0 {
        return Ok(phi.clone());
    }
    let top = xi_half_width(phi, k).max(1);
    if top > XI_MODE_BUDGET {
        return Err(Error::Budget { what: "xi_term half-width", required: top as f64, limit: XI_MODE_BUDGET as f64 });
    }
    let g = next_pow2(2 * top + 1);
    let mut u = synthesize(&phi.resized(phi.support_width().max(1))?, g)?;
    let mut c = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        c *= Complex64::new(0.0, t / j as f64);
    }
    for z in u.iter_mut() {
        *z *= c * z.norm_sqr().powi(k as i32);
    }
    analyze_to(&u, phi.period(), top)
}

/// (t‖φ‖²_∞)^{K+1}/(K+1)!·‖φ‖_{L²}, with ‖φ‖_∞ bounded by ‖φ‖_{FL¹}.
pub fn xi_tail_certificate(phi: &SpectralField, t: f64, kmax: usize) -> Result<f64> {
    let sup = fourier_lebesgue_norm(phi, 0.0, 1.0)?;
    let x = t.abs() * sup * sup;
    let mut term = 1.0;
    for j in 1..=kmax + 1 {
        term *= x / j as f64;
    }
    Ok(term * sobolev_norm(phi, NormSpec::sobolev(0.0))?)
}

/// C^k t^k/k!·(RA)^{2k}·R·f(A).
pub fn xi_upper_bound(k: usize, t: f64, r: f64, a: f64, s: f64, c: f64) -> Result<f64> {
    if k == 0 || !(s < 0.0) {
        return invalid("xi_upper_bound needs k >= 1 and s < 0");
    }
    let x = c * t * (r * a).powi(2);
    let mut v = r * f_factor(a, s);
    for j in 1..=k {
        v *= x / j as f64;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xi1Measurement {
    pub measured: f64,
    pub reference: f64,
    /// measured/reference (0 when both vanish).
    pub ratio: f64,
}

/// ‖P_{<N}Ξ₁(t)‖_{H^s} against t·R³A²·f(A); N is a frequency on ℝ, so the cut is N·L in mode index.
pub fn xi1_lower_measurement(phi: &SpectralField, t: f64, s: f64, n: f64, r: f64, a: f64) -> Result<Xi1Measurement> {
    let xi1 = xi_term(phi, 1, t)?;
    let cut = (n * phi.period()).ceil() as u64;
    let measured = sobolev_norm(&project_below(&xi1, cut), NormSpec::sobolev(s))?;
    let reference = t.abs() * r.powi(3) * a * a * f_factor(a, s);
    let ratio = if reference == 0.0 { 0.0 } else { measured / reference };
    Ok(Xi1Measurement { measured, reference, ratio })
}

pub fn two_block_xi1(tb: &TwoBlock, t: f64, surrogate_period: f64) -> Result<Xi1Measurement> {
    let phi = tb.field(surrogate_period)?;
    xi1_lower_measurement(&phi, t, tb.s, tb.n as f64, tb.r, tb.a)
}

/// (1_{a+Q} * 1_{b+Q})(x) for integer blocks Q = {|n| ≤ h}.
pub fn block_convolution(a: i64, b: i64, h: i64, x: i64) -> i64 {
    (2 * h + 1 - (x - a - b).abs()).max(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::scenario::{build_two_block_data, inflation_time, Regime};
    use crate::evolution::ode_exact_evolve;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(seed: u64, m: usize) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_fn(1.0, m, |_| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).unwrap()
    }

    #[test]
    fn zeroth_and_constant_terms() {
        let phi = random_field(1, 5);
        assert_eq!(xi_term(&phi, 0, 0.3).unwrap(), phi);
        let c = Complex64::new(0.6, -0.8);
        let k = SpectralField::from_fn(1.0, 1, |n| if n == 0 { c } else { Complex64::new(0.0, 0.0) }).unwrap();
        let x = xi_term(&k, 1, 0.7).unwrap();
        let want = Complex64::new(0.0, 0.7) * c.norm_sqr() * c;
        assert!((x.coeff(0) - want).norm() < 1e-15);
        assert!(x.modes().filter(|(n, _)| *n != 0).all(|(_, v)| v.norm() < 1e-15));
    }

    #[test]
    fn xi1_matches_triple_sum() {
        let phi = random_field(2, 4);
        let x = xi_term(&phi, 1, 0.5).unwrap();
        for n in -12i64..=12 {
            let mut acc = Complex64::new(0.0, 0.0);
            for n1 in -4i64..=4 {
                for n2 in -4i64..=4 {
                    let n3 = n - n1 + n2;
                    acc += phi.coeff(n1) * phi.coeff(n2).conj() * phi.coeff(n3);
                }
            }
            assert!((x.coeff(n) - Complex64::new(0.0, 0.5) * acc).norm() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn partial_sums_approach_ode_with_tail_bound() {
        let phi = random_field(3, 6);
        let t = 0.4;
        let series = xi_series(&phi, t, 6).unwrap();
        let exact = ode_exact_evolve(&phi, t, false).unwrap().field;
        let big = series[6].half_width();
        let mut partial = SpectralField::zeros(1.0, big).unwrap();
        for k in 0..=6 {
            partial = partial.add(&series[k]).unwrap();
            let residual = sobolev_norm(&exact.resized(big).unwrap().sub(&partial).unwrap(), NormSpec::sobolev(0.0)).unwrap();
            let bound = xi_tail_certificate(&phi, t, k).unwrap();
            assert!(residual <= bound * (1.0 + 1e-9) + 1e-12, "K={k}: {residual} > {bound}");
        }
    }

    #[test]
    fn series_agrees_with_single_terms() {
        let phi = random_field(4, 3);
        let s = xi_series(&phi, 0.9, 4).unwrap();
        for k in 0..=4 {
            let d = s[k].sub(&xi_term(&phi, k, 0.9).unwrap()).unwrap();
            assert!(d.l2_sq_sum().sqrt() < 1e-13);
        }
    }

    #[test]
    fn budget_refuses() {
        let tb = build_two_block_data(Regime::CritHalf, 1 << 17, -0.5, 0.0).unwrap();
        let phi = tb.torus_field().unwrap();
        match xi_term(&phi, 6, 1e-9) {
            Err(Error::Budget { required, .. }) => assert!(required > XI_MODE_BUDGET as f64),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn upper_bound_ratio() {
        for &(t, r, a, c) in &[(1e-3, 1.0, 20.0, 2.0), (0.5, 0.3, 7.0, 1.0)] {
            for k in 1..6 {
                let q = xi_upper_bound(k + 1, t, r, a, -1.0, c).unwrap() / xi_upper_bound(k, t, r, a, -1.0, c).unwrap();
                let want = c * t * (r * a).powi(2) / (k + 1) as f64;
                assert!((q - want).abs() < 1e-13 * want);
            }
        }
        assert!(xi_upper_bound(0, 1.0, 1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_brute_force() {
        for a_w in 1..=32i64 {
            let h = a_w / 2;
            let (a, b) = (100, 217);
            for x in (a + b - 3 * h - 2)..=(a + b + 3 * h + 2) {
                let mut count = 0;
                for p in (a - h)..=(a + h) {
                    if ((x - p) - b).abs() <= h {
                        count += 1;
                    }
                }
                assert_eq!(count, block_convolution(a, b, h, x));
                if (x - a - b).abs() <= h {
                    assert!(2 * count >= a_w, "A={a_w} x={x}");
                }
            }
            assert!(block_convolution(a, b, h, a + b) >= a_w);
        }
    }

    #[test]
    fn xi1_zero_time() {
        let tb = build_two_block_data(Regime::CritHalf, 256, -0.5, 0.0).unwrap();
        let m = two_block_xi1(&tb, 0.0, 1.0).unwrap();
        assert_eq!((m.measured, m.reference, m.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn xi1_constant_stable_regime_i() {
        let mut cs = Vec::new();
        for p in 8..=12 {
            let n = 1u64 << p;
            let tb = build_two_block_data(Regime::CritHalf, n, -0.5, 0.0).unwrap();
            let t = inflation_time(Regime::CritHalf, n as f64, -0.5, 0.0).unwrap().t_n;
            cs.push(two_block_xi1(&tb, t, 1.0).unwrap().ratio);
        }
        let (lo, hi) = cs.iter().fold((f64::MAX, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
        assert!(hi <= 4.0 * lo && (cs[0] - 1.663_547_767_819).abs() < 1e-9, "{cs:?}");
    }

    fn support_intervals(n: i64, h: i64, k: usize) -> Vec<(i64, i64)> {
        let mut centers = vec![0i64];
        for j in 0..(2 * k + 1) {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            centers = centers.iter().flat_map(|&c| [c + sign * n, c + sign * 2 * n]).collect();
        }
        let r = (2 * k as i64 + 1) * h;
        centers.iter().map(|&c| (c - r, c + r)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn support_count(a_w in 1i64..=16, k in 1usize..=3, extra in 0i64..8) {
            let h = a_w / 2;
            let n = 2 * h + 2 + extra;
            let b1 = (n - h)..=(n + h);
            let b2 = (2 * n - h)..=(2 * n + h);
            let phi = SpectralField::from_fn(1.0, (2 * n + h) as usize, |m| {
                if b1.contains(&m) || b2.contains(&m) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            }).unwrap();
            let xi = xi_term(&phi, k, 1.0).unwrap();
            let ivs = support_intervals(n, h, k);
            prop_assert!(ivs.len() <= 1 << (2 * k + 1));
            let scale = xi.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
            for (m, c) in xi.modes() {
                if c.norm() > 1e-9 * scale {
                    prop_assert!(ivs.iter().any(|&(lo, hi)| lo <= m && m <= hi), "mode {} outside", m);
                }
            }
            for &(lo, hi) in &ivs {
                prop_assert!(((hi - lo) as f64) <= ((2 * k + 1) as f64) * a_w as f64);
            }
        }
    }
}
