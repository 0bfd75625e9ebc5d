use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bounds::{blid_derivative_bounds, verify_condition_7_6, ConditionReport, DerivativeBounds};
use super::conjugacy::{conjugacy_iterate, fit_beta, BetaFit, ConjugacyResult, ConjugacySummary, VectorMap};
use super::hyperbolic::HyperbolicLinear;
use super::perturbation::{globalize_perturbation, PerturbationSpec, PerturbationSummary};
use crate::blid::BlidMap;
use crate::bump::BumpFunction;
use crate::error::{BlidError, Result};

fn default_domain_radius() -> f64 {
    0.3
}

fn default_max_iter() -> usize {
    500
}

fn default_samples() -> usize {
    1000
}

/// One global linearization experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearizationProblem {
    pub matrix: Vec<Vec<f64>>,
    pub f_name: String,
    pub alpha: f64,
    pub delta: f64,
    pub bump: BumpFunction,
    pub box_radius: f64,
    pub grid_n: usize,
    pub tol: f64,
    #[serde(default = "default_domain_radius")]
    pub domain_radius: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Global bound on `‖Df‖`; estimated on the ball `f̃` reads when absent.
    #[serde(default)]
    pub delta_eta: Option<f64>,
    /// Sample budget of the bound estimates.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Radii for the exponent fit; nine radii over two decades below
    /// `δ·r_in / 2` when absent.
    #[serde(default)]
    pub fit_radii: Option<Vec<f64>>,
}

impl LinearizationProblem {
    pub fn fit_radii(&self) -> Vec<f64> {
        self.fit_radii.clone().unwrap_or_else(|| {
            let top = 0.5 * self.delta * self.bump.r_in();
            (0..9).map(|i| top * 10f64.powf(-(i as f64) / 4.0)).collect()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizationReport {
    pub hyperbolic: serde_json::Value,
    pub perturbation: PerturbationSummary,
    pub derivative_bounds: DerivativeBounds,
    pub condition: ConditionReport,
    pub conjugacy: ConjugacySummary,
    pub beta: BetaFit,
    /// The box contains the support of `f̃`, so zero extension of the
    /// table outside it is consistent with the equation.
    pub box_covers_support: bool,
    /// `β̂ ∈ (0, α]`; informational, not part of the verdict.
    pub beta_in_range: bool,
    pub seed: u64,
    /// Condition check passed, the iteration converged and both residuals
    /// are within `10·tol`.
    pub pass: bool,
}

/// Globalizes, checks the derivative bounds, solves for the conjugacy and
/// fits its exponent.
pub fn run_linearization(problem: &LinearizationProblem, seed: u64) -> Result<(LinearizationReport, ConjugacyResult)> {
    let config = |field: &str, e: BlidError| match e {
        BlidError::Configuration(m) => BlidError::Configuration(m),
        other => BlidError::Configuration(format!("{field}: {other}")),
    };
    let lambda = HyperbolicLinear::new(&problem.matrix).map_err(|e| config("matrix", e))?;
    let dim = lambda.dimension();
    let spec = PerturbationSpec::from_catalog(&problem.f_name, dim, problem.domain_radius, problem.alpha, problem.delta)
        .map_err(|e| config("f_name", e))?;
    let h = BlidMap::finite_dim(problem.bump, dim)?;
    let f_tilde = Arc::new(globalize_perturbation(&spec, &h)?);

    let derivative_bounds = blid_derivative_bounds(&h, problem.samples, seed)?;
    let condition = verify_condition_7_6(&f_tilde, problem.delta_eta, problem.samples, seed)?;
    let map: VectorMap = {
        let f = Arc::clone(&f_tilde);
        Arc::new(move |x: &[f64]| f.apply(x))
    };
    let result = conjugacy_iterate(&lambda, map, problem.box_radius, problem.grid_n, problem.tol, problem.max_iter)?;
    let beta = fit_beta(&result, &problem.fit_radii(), problem.alpha).map_err(|e| config("fit_radii", e))?;
    let summary = result.summary().clone();
    let pass = condition.pass
        && summary.converged
        && summary.residual <= 10.0 * problem.tol
        && summary.validation_residual <= 10.0 * problem.tol;
    let report = LinearizationReport {
        hyperbolic: serde_json::to_value(&lambda)?,
        perturbation: f_tilde.summary(),
        derivative_bounds,
        beta_in_range: beta.beta_hat.is_some_and(|b| b > 0.0 && b <= problem.alpha),
        box_covers_support: problem.box_radius >= f_tilde.support_radius(),
        condition,
        conjugacy: summary,
        beta,
        seed,
        pass,
    };
    Ok((report, result))
}
