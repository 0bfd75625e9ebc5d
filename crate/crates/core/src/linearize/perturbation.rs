use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{jacobian, operator_norm};
use crate::blid::{BlidKind, BlidMap};
use crate::error::{argument, BlidError, Result};
use crate::funcspace::euclidean_norm;
use crate::funcspace::sampling::{log_uniform, sample_rng};
use crate::germ::{LocalMap, Rule, SourceSpace};

pub const PERTURBATION_NAMES: &[&str] = &["zero", "square", "swap_square"];

/// Samples used to estimate the local Hölder constant of `Df`.
const HOLDER_SAMPLES: usize = 2000;
const HOLDER_SEED: u64 = 0x4d48;

/// Local nonlinear parts `f` with `f(0) = 0`, `Df(0) = 0`.
///
/// `square` is `x ↦ (x₁², …, xₙ²)`; `swap_square` is `(x₂², x₁²)` in the
/// plane and the cyclic shift `(x₂², x₃², x₁²)` in ℝ³.
pub fn perturbation_rule(name: &str, dim: usize) -> Option<Rule<Vec<f64>, Vec<f64>>> {
    match name {
        "zero" => Some(Arc::new(|x: &Vec<f64>| vec![0.0; x.len()])),
        "square" => Some(Arc::new(|x: &Vec<f64>| x.iter().map(|v| v * v).collect())),
        "swap_square" if dim >= 2 => Some(Arc::new(|x: &Vec<f64>| {
            let n = x.len();
            (0..n).map(|i| x[(i + 1) % n] * x[(i + 1) % n]).collect()
        })),
        _ => None,
    }
}

/// The nonlinear part `f = F − Λ` of a map with a fixed point at 0, with
/// the globalization data.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    f: LocalMap<Vec<f64>>,
    dim: usize,
    alpha: f64,
    delta: f64,
    holder_constant_local: f64,
}

impl PerturbationSpec {
    pub fn new(f: LocalMap<Vec<f64>>, alpha: f64, delta: f64) -> Result<Self> {
        let dim = match f.space() {
            SourceSpace::Euclidean { dim } => *dim,
            other => return Err(argument(format!("perturbations act on ℝⁿ, not {other:?}"))),
        };
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(argument(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(argument(format!("delta must be positive, got {delta}")));
        }
        let zero = vec![0.0; dim];
        let f0 = f.apply(&zero)?;
        let rule = |x: &[f64]| f.apply_unchecked(&x.to_vec());
        let df0 = operator_norm(&jacobian(&rule, &zero));
        if euclidean_norm(&f0) > 1e-12 || df0 > 1e-6 {
            return Err(argument(format!(
                "perturbation must satisfy f(0) = 0 and Df(0) = 0 (|f(0)| = {:e}, |Df(0)| = {df0:e})",
                euclidean_norm(&f0)
            )));
        }
        let holder_constant_local = holder_sup(&f, alpha, f.domain_radius() * (1.0 - 1e-9), HOLDER_SAMPLES, HOLDER_SEED);
        Ok(Self {
            f,
            dim,
            alpha,
            delta,
            holder_constant_local,
        })
    }

    /// Catalog perturbation on the Euclidean ball of `domain_radius`.
    pub fn from_catalog(name: &str, dim: usize, domain_radius: f64, alpha: f64, delta: f64) -> Result<Self> {
        let rule = perturbation_rule(name, dim).ok_or_else(|| {
            BlidError::Configuration(format!(
                "f_name: unknown perturbation {name:?} for dimension {dim} (known: {PERTURBATION_NAMES:?})"
            ))
        })?;
        let f = LocalMap::new(name, SourceSpace::Euclidean { dim }, domain_radius, move |x: &Vec<f64>| rule(x))?;
        Self::new(f, alpha, delta)
    }

    pub fn local(&self) -> &LocalMap<Vec<f64>> {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn domain_radius(&self) -> f64 {
        self.f.domain_radius()
    }

    /// Sampled `M = sup ‖Df(y)‖/‖y‖^α` over the local domain.
    pub fn holder_constant_local(&self) -> f64 {
        self.holder_constant_local
    }

    /// The same perturbation globalized at another scale.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(argument(format!("delta must be positive, got {delta}")));
        }
        let mut s = self.clone();
        s.delta = delta;
        Ok(s)
    }
}

/// `y` on the sphere of radius `r`: a coordinate axis (with sign) for every
/// fourth sample, a uniform random direction otherwise.
pub(crate) fn sample_direction<R: Rng>(rng: &mut R, index: usize, dim: usize) -> Vec<f64> {
    if index.is_multiple_of(4) {
        let axis = (index / 4) % (2 * dim);
        let mut v = vec![0.0; dim];
        v[axis / 2] = if axis.is_multiple_of(2) { 1.0 } else { -1.0 };
        return v;
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = euclidean_norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

/// `sup ‖Df(y)‖/‖y‖^α` over `‖y‖` log-uniform in `[1e-6, 1]·radius`.
pub(crate) fn holder_sup(f: &LocalMap<Vec<f64>>, alpha: f64, radius: f64, samples: usize, seed: u64) -> f64 {
    let rule = |x: &[f64]| f.apply_unchecked(&x.to_vec());
    let dim = match f.space() {
        SourceSpace::Euclidean { dim } => *dim,
        SourceSpace::Function(_) => return f64::NAN,
    };
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let r = if i % 4 == 0 { radius } else { log_uniform(&mut rng, 1e-6 * radius, radius) };
            let y: Vec<f64> = sample_direction(&mut rng, i, dim).iter().map(|v| v * r).collect();
            operator_norm(&jacobian(&rule, &y)) / r.powf(alpha)
        })
        .reduce(|| 0.0, f64::max)
}

/// `f̃(x) = f(δ·H(x/δ))`, equal to `f(x)` on `‖x‖ ≤ δ·r_in`.
#[derive(Debug, Clone)]
pub struct GlobalizedPerturbation {
    spec: PerturbationSpec,
    h: BlidMap,
    c0: f64,
}

/// Checks that `H` is the identity on the unit ball with image bound `c0`
/// and that `δ·c0` fits inside the domain of `f`.
pub fn globalize_perturbation(spec: &PerturbationSpec, h: &BlidMap) -> Result<GlobalizedPerturbation> {
    if h.kind() != BlidKind::FiniteDim || h.dim() != spec.dim {
        return Err(BlidError::Configuration(format!(
            "globalization needs an unscaled finite-dimensional blid map on ℝ^{}, got {:?} on ℝ^{}",
            spec.dim,
            h.kind(),
            h.dim()
        )));
    }
    if h.identity_radius() < 1.0 {
        return Err(BlidError::Configuration(format!(
            "bump: the blid map must be the identity on the unit ball (identity radius {})",
            h.identity_radius()
        )));
    }
    let c0 = h
        .claimed_bound()
        .ok_or_else(|| BlidError::Configuration("bump: blid map carries no certified bound".into()))?;
    if spec.delta * c0 >= spec.domain_radius() {
        return Err(BlidError::Configuration(format!(
            "delta: δ·c0 = {} is not below the domain radius {}",
            spec.delta * c0,
            spec.domain_radius()
        )));
    }
    Ok(GlobalizedPerturbation {
        spec: spec.clone(),
        h: h.clone(),
        c0,
    })
}

impl GlobalizedPerturbation {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let delta = self.spec.delta;
        let f = &self.spec.f;
        if euclidean_norm(x) <= delta * self.h.identity_radius() {
            return f.apply_unchecked(&x.to_vec());
        }
        let u: Vec<f64> = x.iter().map(|v| v / delta).collect();
        let hu = self.h.apply_vec(&u).expect("dimension checked at construction");
        let y: Vec<f64> = hu.iter().map(|v| delta * v).collect();
        f.apply(&y).expect("δ·c0 lies inside the domain")
    }

    pub fn spec(&self) -> &PerturbationSpec {
        &self.spec
    }

    pub fn blid(&self) -> &BlidMap {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn delta(&self) -> f64 {
        self.spec.delta
    }

    /// Image bound of `H` used for the containment check.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Outside this radius `f̃ = f(0) = 0`.
    pub fn support_radius(&self) -> f64 {
        self.spec.delta * self.h.bump().r_out()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSummary {
    pub f_name: String,
    pub dim: usize,
    pub alpha: f64,
    pub delta: f64,
    pub domain_radius: f64,
    pub holder_constant_local: f64,
    pub c0: f64,
    pub support_radius: f64,
}

impl GlobalizedPerturbation {
    pub fn summary(&self) -> PerturbationSummary {
        PerturbationSummary {
            f_name: self.spec.f.name().to_string(),
            dim: self.spec.dim,
            alpha: self.spec.alpha,
            delta: self.spec.delta,
            domain_radius: self.spec.domain_radius(),
            holder_constant_local: self.spec.holder_constant_local,
            c0: self.c0,
            support_radius: self.support_radius(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpFunction;

    fn square_2d(delta: f64) -> GlobalizedPerturbation {
        let spec = PerturbationSpec::from_catalog("swap_square", 2, 0.3, 1.0, delta).unwrap();
        globalize_perturbation(&spec, &BlidMap::finite_dim(BumpFunction::default(), 2).unwrap()).unwrap()
    }

    #[test]
    fn catalog_and_validation() {
        assert!(PerturbationSpec::from_catalog("cube", 2, 0.3, 1.0, 0.1).is_err());
        assert!(PerturbationSpec::from_catalog("swap_square", 1, 0.3, 1.0, 0.1).is_err());
        assert!(PerturbationSpec::from_catalog("square", 2, 0.3, 1.5, 0.1).is_err());
        let linear = LocalMap::new("linear", SourceSpace::Euclidean { dim: 1 }, 1.0, |x: &Vec<f64>| x.clone()).unwrap();
        assert!(PerturbationSpec::new(linear, 1.0, 0.1).is_err());
        let s = PerturbationSpec::from_catalog("square", 2, 0.3, 1.0, 0.1).unwrap();
        // ‖Df(y)‖ = 2 max|y_i| ≤ 2‖y‖, attained on the axes.
        assert!((s.holder_constant_local() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn identity_region_is_exact_and_far_field_is_contained() {
        let g = square_2d(0.1);
        let f = g.spec().local().clone();
        for x in [[0.0, 0.0], [0.05, -0.07], [0.0999, 0.0]] {
            assert_eq!(g.apply(&x), f.apply(&x.to_vec()).unwrap());
        }
        assert_eq!(g.apply(&[0.0, 0.0]), vec![0.0, 0.0]);
        let far = g.apply(&[1e5, 0.0]);
        assert_eq!(far, vec![0.0, 0.0]);
        let mid = g.apply(&[0.12, 0.0]);
        assert!(euclidean_norm(&mid) <= (g.delta() * g.c0()).powi(2));
    }

    #[test]
    fn containment_precondition() {
        let spec = PerturbationSpec::from_catalog("square", 2, 0.3, 1.0, 0.26).unwrap();
        let h = BlidMap::finite_dim(BumpFunction::default(), 2).unwrap();
        assert!(matches!(globalize_perturbation(&spec, &h), Err(BlidError::Configuration(_))));
        let small = BlidMap::finite_dim(BumpFunction::new(0.5, 2.0).unwrap(), 2).unwrap();
        let ok = PerturbationSpec::from_catalog("square", 2, 0.3, 1.0, 0.1).unwrap();
        assert!(globalize_perturbation(&ok, &small).is_err());
        assert!(globalize_perturbation(&ok, &BlidMap::finite_dim(BumpFunction::default(), 3).unwrap()).is_err());
    }
}
