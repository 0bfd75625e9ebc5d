//! Globalization of a local perturbation of a hyperbolic linear map, the
//! numerical check of the derivative bounds the global linearization theorem
//! needs, and the conjugacy `Φ∘F = Λ∘Φ` with its exponent at the fixed point.

mod bounds;
mod conjugacy;
mod hyperbolic;
pub mod linalg;
mod perturbation;
mod problem;

pub use bounds::{blid_derivative_bounds, verify_condition_7_6, ConditionReport, DerivativeBounds, RADIAL_SCAN_POINTS};
pub use conjugacy::{
    conjugacy_iterate, fit_beta, BetaFit, ConjugacyResult, ConjugacySummary, VectorMap, BETA_NOISE_FLOOR,
    LIFT_STEPS, MAX_DIMENSION,
};
pub use hyperbolic::HyperbolicLinear;
pub use perturbation::{
    globalize_perturbation, perturbation_rule, GlobalizedPerturbation, PerturbationSpec, PerturbationSummary,
    PERTURBATION_NAMES,
};
pub use problem::{run_linearization, LinearizationProblem, LinearizationReport};
