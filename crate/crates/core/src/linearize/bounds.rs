use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{jacobian, operator_norm};
use super::perturbation::{holder_sup, sample_direction, GlobalizedPerturbation};
use crate::blid::{BlidDomain, BlidKind, BlidMap};
use crate::diffcheck::directional_derivative_at;
use crate::error::Result;
use crate::funcspace::euclidean_norm;
use crate::funcspace::sampling::{
    log_uniform, random_jet, random_smooth_grid, random_vector, sample_rng, stratified_amplitude, RandomLike,
};

/// Points of the radial scan along `e₁` for finite-dimensional maps.
pub const RADIAL_SCAN_POINTS: usize = 10_000;
/// Directions per sample for function-space kinds.
const FUNCTION_DIRECTIONS: usize = 4;

/// Sampled `c0 = sup ‖H(x)‖` and `c1 = sup ‖DH(x)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBounds {
    pub c0: f64,
    pub c1: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Estimates `c0` and `c1` for `h`.
///
/// Finite-dimensional maps use power iteration on central-difference
/// Jacobians, over random samples and a radial scan of `[0, r_out]` along
/// `e₁` (the construction is radial, so the scan sees every profile value).
/// Function-space maps use `‖DH(x)v‖/‖v‖` over sampled directions, in the
/// map's governing (input) and output norms.
pub fn blid_derivative_bounds(h: &BlidMap, sample_budget: usize, rng_seed: u64) -> Result<DerivativeBounds> {
    let layout = h.sample_layout();
    let (c0, c1) = match h.base_kind() {
        BlidKind::FiniteDim => finite_dim_bounds(h, sample_budget, rng_seed)?,
        BlidKind::PointwiseC0 => function_bounds(h, sample_budget, rng_seed, |rng, amp| {
            random_smooth_grid(rng, &layout, amp)
        })?,
        BlidKind::JetCq | BlidKind::WindowedFamilyMember => {
            function_bounds(h, sample_budget, rng_seed, |rng, amp| random_jet(rng, h.q(), &layout, amp))?
        }
        BlidKind::Scaled => unreachable!("base kind is never Scaled"),
    };
    Ok(DerivativeBounds {
        c0,
        c1,
        samples: sample_budget,
        seed: rng_seed,
    })
}

/// Amplitude for sample `i`: uniform over the transition band for two thirds
/// of the samples, stratified `10^-2 … 10^6` for the rest (unscaled units).
fn amplitude(h: &BlidMap, rng: &mut ChaCha8Rng, i: usize) -> f64 {
    let unit = 1.0 / h.scale_in();
    match i % 3 {
        2 => unit * stratified_amplitude(i / 3),
        _ => unit * h.bump().r_out() * 1.2 * rng.gen_range(0.0..1.0),
    }
}

fn finite_dim_bounds(h: &BlidMap, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let n = h.dim();
    let map = |x: &[f64]| h.apply_vec(x).expect("dimension matches");
    let at = |x: &[f64]| -> (f64, f64) { (euclidean_norm(&map(x)), operator_norm(&jacobian(&map, x))) };
    let random = (0..samples).into_par_iter().map(|i| {
        let mut rng = sample_rng(seed, i as u64);
        let amp = amplitude(h, &mut rng, i);
        at(&random_vector(&mut rng, n, amp))
    });
    let reach = h.bump().r_out() / h.scale_in();
    let scan = (0..=RADIAL_SCAN_POINTS).into_par_iter().map(|j| {
        let mut x = vec![0.0; n];
        x[0] = reach * j as f64 / RADIAL_SCAN_POINTS as f64;
        at(&x)
    });
    Ok(random
        .chain(scan)
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))))
}

fn function_bounds<E, F>(h: &BlidMap, samples: usize, seed: u64, draw: F) -> Result<(f64, f64)>
where
    E: BlidDomain + RandomLike,
    F: Fn(&mut ChaCha8Rng, f64) -> E + Sync,
{
    let map = |x: &E| x.blid_apply(h);
    let per_sample: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut rng = sample_rng(seed, i as u64);
            let amp = amplitude(h, &mut rng, i);
            let x = draw(&mut rng, amp);
            let c0 = map(&x)?.output_norm(h);
            let t = 1e-6 * (1.0 + x.governing_norm(h));
            let mut c1: f64 = 0.0;
            for _ in 0..FUNCTION_DIRECTIONS {
                let v = x.random_like(&mut rng, 1.0);
                let dv: E = directional_derivative_at(&map, &x, &v, t)?;
                c1 = c1.max(dv.output_norm(h) / v.governing_norm(h));
            }
            Ok((c0, c1))
        })
        .collect::<Result<_>>()?;
    Ok(per_sample
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))))
}

/// Numerical check of the pair of bounds required of the globalized
/// perturbation `f̃(x) = f(δH(x/δ))`:
///
/// * global: `sup ‖Df̃(x)‖ ≤ δ_η·c1`, where `δ_η = sup_{‖y‖≤δc0} ‖Df(y)‖`
///   unless given;
/// * Hölder at 0: `sup ‖Df̃(x)‖/‖x‖^α ≤ M·c1·m^α` with `M` the local Hölder
///   constant of `Df` and `m = sup ‖δH(x/δ)‖/‖x‖`.
///
/// Inequalities are compared exactly, without tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub delta: f64,
    pub alpha: f64,
    pub global_sup: f64,
    pub delta_eta: f64,
    pub delta_eta_estimated: bool,
    pub c0: f64,
    pub c1: f64,
    pub global_bound: f64,
    pub global_pass: bool,
    pub holder_sup: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub holder_constant: f64,
    pub holder_bound: f64,
    pub holder_pass: bool,
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
}

/// Samples `x` with `‖x‖` log-uniform in `[1e-6, 1e3]·δ`, every fourth one
/// on a coordinate axis, and compares both suprema with their bounds.
pub fn verify_condition_7_6(
    f_tilde: &GlobalizedPerturbation,
    delta_eta: Option<f64>,
    sample_budget: usize,
    rng_seed: u64,
) -> Result<ConditionReport> {
    let spec = f_tilde.spec();
    let (delta, alpha, dim) = (spec.delta(), spec.alpha(), spec.dim());
    let bounds = blid_derivative_bounds(f_tilde.blid(), sample_budget, rng_seed)?;
    let c1 = bounds.c1;
    let c0 = f_tilde.c0();

    let (delta_eta, delta_eta_estimated) = match delta_eta {
        Some(v) => (v, false),
        None => (local_derivative_sup(f_tilde, sample_budget, rng_seed), true),
    };
    let holder_constant = spec.holder_constant_local();

    let ft = |x: &[f64]| f_tilde.apply(x);
    let h = f_tilde.blid();
    let (global_sup, holder_sup, m) = (0..sample_budget)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(rng_seed, i as u64);
            let r = log_uniform(&mut rng, 1e-6 * delta, 1e3 * delta);
            let x: Vec<f64> = sample_direction(&mut rng, i, dim).iter().map(|v| v * r).collect();
            let norm = euclidean_norm(&x);
            let d = operator_norm(&jacobian(&ft, &x));
            let u: Vec<f64> = x.iter().map(|v| v / delta).collect();
            let hu = h.apply_vec(&u).expect("dimension matches");
            let ratio = delta * euclidean_norm(&hu) / norm;
            (d, d / norm.powf(alpha), ratio)
        })
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)));

    let global_bound = delta_eta * c1;
    let holder_bound = holder_constant * c1 * m.powf(alpha);
    let global_pass = global_sup <= global_bound;
    let holder_pass = holder_sup <= holder_bound;
    Ok(ConditionReport {
        delta,
        alpha,
        global_sup,
        delta_eta,
        delta_eta_estimated,
        c0,
        c1,
        global_bound,
        global_pass,
        holder_sup,
        m,
        holder_constant,
        holder_bound,
        holder_pass,
        samples: sample_budget,
        seed: rng_seed,
        pass: global_pass && holder_pass,
    })
}

/// `sup ‖Df(y)‖` over the ball `‖y‖ ≤ δ·c0` that `f̃` reads `f` on: the
/// sphere samples of the Hölder estimate at full radius plus interior
/// points, with the axis points `±δc0·e_i` always included.
fn local_derivative_sup(f_tilde: &GlobalizedPerturbation, samples: usize, seed: u64) -> f64 {
    let spec = f_tilde.spec();
    let radius = (spec.delta() * f_tilde.c0()).min(spec.domain_radius() * (1.0 - 1e-9));
    let f = spec.local();
    // With α = 0 the quotient is ‖Df(y)‖ itself.
    let sphere_and_interior = holder_sup(f, 0.0, radius, samples, seed ^ 0x6465);
    let rule = |x: &[f64]| f.apply_unchecked(&x.to_vec());
    let axes = (0..2 * spec.dim())
        .map(|a| {
            let mut y = vec![0.0; spec.dim()];
            y[a / 2] = if a % 2 == 0 { radius } else { -radius };
            operator_norm(&jacobian(&rule, &y))
        })
        .fold(0.0, f64::max);
    sphere_and_interior.max(axes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpFunction;
    use crate::linearize::perturbation::{globalize_perturbation, PerturbationSpec};

    #[test]
    fn finite_dim_constants() {
        let h = BlidMap::finite_dim(BumpFunction::default(), 2).unwrap();
        let b = blid_derivative_bounds(&h, 1000, 5).unwrap();
        // c0 = max u·h(u) = a, c1 = max |h(u) + u h'(u)|, both from a
        // 10⁵-point scan of the profile.
        let bump = BumpFunction::default();
        let (mut a, mut slope) = (0.0f64, 0.0f64);
        for i in 0..=100_000 {
            let u = 2.0 * i as f64 / 100_000.0;
            a = a.max(u * bump.eval(u));
            slope = slope.max((bump.eval(u) + u * bump.deriv(u)).abs());
        }
        assert!((b.c0 - a).abs() < 1e-6, "{} vs {a}", b.c0);
        assert!((b.c1 - slope).abs() < 1e-4, "{} vs {slope}", b.c1);
        assert!(b.c1 >= 1.0);
    }

    #[test]
    fn function_space_constants() {
        let h = BlidMap::pointwise_c0(BumpFunction::default());
        let b = blid_derivative_bounds(&h, 60, 1).unwrap();
        assert!(b.c0 <= h.claimed_bound().unwrap());
        assert!(b.c1 >= 1.0 - 1e-6 && b.c1 < 3.0);
        let j = BlidMap::jet_cq(BumpFunction::default(), 2).unwrap();
        let bj = blid_derivative_bounds(&j, 30, 1).unwrap();
        assert!(bj.c0 <= j.claimed_bound().unwrap());
        assert!(bj.c1.is_finite() && bj.c1 > 0.0);
    }

    fn globalized(name: &str, delta: f64) -> GlobalizedPerturbation {
        let spec = PerturbationSpec::from_catalog(name, 2, 0.3, 1.0, delta).unwrap();
        globalize_perturbation(&spec, &BlidMap::finite_dim(BumpFunction::default(), 2).unwrap()).unwrap()
    }

    #[test]
    fn zero_perturbation_is_trivial() {
        let r = verify_condition_7_6(&globalized("zero", 0.1), None, 400, 3).unwrap();
        assert_eq!(r.global_sup, 0.0);
        assert_eq!(r.holder_sup, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn quadratic_example_passes() {
        let r = verify_condition_7_6(&globalized("swap_square", 0.1), None, 1000, 42).unwrap();
        assert!(r.pass, "{r:?}");
        // The identity region gives m ≥ 1, and m ≤ 1 since h ≤ 1 on ℝⁿ.
        assert!((r.m - 1.0).abs() < 1e-12);
        // δ_η = 2·δ·c0 for the swapped square.
        assert!((r.delta_eta - 2.0 * 0.1 * r.c0).abs() < 1e-6);
    }
}
