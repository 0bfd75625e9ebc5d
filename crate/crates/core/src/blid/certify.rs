use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BlidDomain, BlidKind, BlidMap};
use crate::error::Result;
use crate::funcspace::sampling::{
    random_jet, random_smooth_grid, random_vector, sample_rng, stratified_amplitude,
};

/// Deviation below which `H(x)` counts as equal to `x`.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Slack allowed between the empirical and the claimed bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub construction: String,
    pub parameters: serde_json::Value,
    /// Smallest governing norm at which a sample left the identity branch,
    /// or the largest sampled norm if none did.
    pub empirical_identity_radius: f64,
    /// Largest `|H(x) - x|` over samples strictly inside the claimed radius.
    pub identity_deviation: f64,
    pub empirical_bound: f64,
    pub claimed_bound: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
}

struct Outcome {
    norm: f64,
    deviation: f64,
    output: f64,
    inside: bool,
}

/// Samples `H` on three strata, cycled by index: inside the claimed identity
/// radius, just beyond it, and at amplitudes `10^-2 … 10^6` (in units of the
/// unscaled map). Sample `i` uses its own generator seeded with `seed + i`.
pub fn certify_blid(h: &BlidMap, sample_budget: usize, rng_seed: u64) -> Result<CertificationReport> {
    let layout = h.sample_layout();
    let outcomes = match h.base_kind() {
        BlidKind::PointwiseC0 => run(h, sample_budget, rng_seed, |rng, amp| {
            random_smooth_grid(rng, &layout, amp)
        })?,
        BlidKind::JetCq | BlidKind::WindowedFamilyMember => {
            run(h, sample_budget, rng_seed, |rng, amp| random_jet(rng, h.q(), &layout, amp))?
        }
        BlidKind::FiniteDim => {
            run(h, sample_budget, rng_seed, |rng, amp| random_vector(rng, h.dim(), amp))?
        }
        BlidKind::Scaled => unreachable!("base kind is never Scaled"),
    };

    let identity_deviation = outcomes
        .iter()
        .filter(|o| o.inside)
        .map(|o| o.deviation)
        .fold(0.0, f64::max);
    let empirical_identity_radius = outcomes
        .iter()
        .filter(|o| o.deviation > IDENTITY_TOLERANCE)
        .map(|o| o.norm)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
        .unwrap_or_else(|| outcomes.iter().map(|o| o.norm).fold(0.0, f64::max));
    let empirical_bound = outcomes.iter().map(|o| o.output).fold(0.0, f64::max);
    let claimed_bound = h.claimed_bound();
    let pass = identity_deviation <= IDENTITY_TOLERANCE
        && claimed_bound.is_some_and(|c| empirical_bound <= c + BOUND_TOLERANCE);

    Ok(CertificationReport {
        construction: construction_name(h),
        parameters: serde_json::to_value(h)?,
        empirical_identity_radius,
        identity_deviation,
        empirical_bound,
        claimed_bound,
        samples: sample_budget,
        seed: rng_seed,
        pass,
    })
}

fn construction_name(h: &BlidMap) -> String {
    let base = match h.base_kind() {
        BlidKind::PointwiseC0 => "pointwise_c0".to_string(),
        BlidKind::JetCq => format!("jet_c{}", h.q()),
        BlidKind::WindowedFamilyMember => format!("windowed_member_{}", h.k()),
        BlidKind::FiniteDim => format!("finite_dim_{}", h.dim()),
        BlidKind::Scaled => unreachable!("base kind is never Scaled"),
    };
    match (h.metric_bound(), h.is_scaled()) {
        (Some(_), _) => format!("metric_scaled({base})"),
        (None, true) => format!("scaled({base})"),
        (None, false) => base,
    }
}

fn run<E, F>(h: &BlidMap, samples: usize, seed: u64, draw: F) -> Result<Vec<Outcome>>
where
    E: BlidDomain,
    F: Fn(&mut ChaCha8Rng, f64) -> E + Sync,
{
    let radius = h.identity_radius();
    let unit = radius / h.bump().r_in();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let (amplitude, inside) = match i % 3 {
                0 => (radius * (1.0 - 1e-9) * rng.gen_range(0.0..1.0), true),
                1 => (radius * (1.0 + rng.gen_range(0.0..1.0)), false),
                _ => (unit * stratified_amplitude(i / 3), false),
            };
            let x = draw(&mut rng, amplitude);
            let y = x.blid_apply(h)?;
            Ok(Outcome {
                norm: x.governing_norm(h),
                deviation: x.identity_deviation(&y),
                output: y.output_norm(h),
                inside,
            })
        })
        .collect()
}
