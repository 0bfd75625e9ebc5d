//! Numerical evidence for bounded, compact and Fréchet differentiability and
//! for the chain rule. Remainders `r(h) = f(x+h) - f(x) - A·h` are tabulated
//! over a step schedule and their decay is judged by a log-log slope fit.
//! Nothing here proves differentiability.

mod report;

pub use report::{write_ratios_csv, ChainRuleReport, DifferentiabilityReport, Notion, RatioRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::funcspace::sampling::{sample_rng, RandomLike};
use crate::funcspace::Vector;

pub const DEFAULT_DIRECTIONS: usize = 16;
pub const CHAIN_RULE_TOLERANCE: f64 = 1e-6;

/// Decreasing positive step sizes `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StepSchedule(Vec<f64>);

impl StepSchedule {
    pub fn new(steps: Vec<f64>) -> Result<Self> {
        if steps.len() < 2 {
            return Err(argument("step schedule needs at least two steps"));
        }
        if steps.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(argument("steps must be positive and finite"));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(argument("steps must be strictly decreasing"));
        }
        Ok(Self(steps))
    }

    pub fn steps(&self) -> &[f64] {
        &self.0
    }

    pub fn finest(&self) -> f64 {
        *self.0.last().expect("non-empty")
    }
}

impl Default for StepSchedule {
    /// `10^-1, …, 10^-6`.
    fn default() -> Self {
        Self((1..=6).map(|e| 10f64.powi(-e)).collect())
    }
}

impl TryFrom<Vec<f64>> for StepSchedule {
    type Error = crate::error::BlidError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<StepSchedule> for Vec<f64> {
    fn from(s: StepSchedule) -> Self {
        s.0
    }
}

/// Pass thresholds of a decay verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub slope: f64,
    pub ratio: f64,
    /// Ratios below `noise_rel · (1 + ‖f(x)‖)` count as converged; they are
    /// at the rounding level of the differences that produce them.
    pub noise_rel: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            slope: 0.9,
            ratio: 1e-4,
            noise_rel: 1e-9,
        }
    }
}

/// Source and target norms of a differentiability check.
pub struct NormPair<'a, X, Y> {
    pub source: &'a (dyn Fn(&X) -> f64 + Sync),
    pub target: &'a (dyn Fn(&Y) -> f64 + Sync),
}

impl<X, Y> Clone for NormPair<'_, X, Y> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<X, Y> Copy for NormPair<'_, X, Y> {}

/// Estimated `A·v` for a set of directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeEstimate<X, Y> {
    pub base_point: X,
    pub directions: Vec<X>,
    pub values: Vec<Y>,
    pub step_schedule: StepSchedule,
    pub richardson_order: usize,
}

/// Central difference at step `t` with one Richardson level:
/// `(4 D(t/2) - D(t)) / 3`, `D(s) = (f(x+sv) - f(x-sv)) / 2s`.
pub fn directional_derivative_at<X, Y, F>(f: &F, x: &X, v: &X, t: f64) -> Result<Y>
where
    X: Vector,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + ?Sized,
{
    let central = |s: f64| -> Result<Y> {
        let plus = f(&x.add_scaled(s, v))?;
        let minus = f(&x.add_scaled(-s, v))?;
        Ok(plus.sub(&minus).scaled(0.5 / s))
    };
    let coarse = central(t)?;
    let fine = central(0.5 * t)?;
    Ok(fine.scaled(4.0 / 3.0).add_scaled(-1.0 / 3.0, &coarse))
}

/// [`directional_derivative_at`] at the finest step of `schedule`, kept
/// above `√ε · (1 + ‖x‖)`.
pub fn directional_derivative<X, Y, F>(
    f: &F,
    x: &X,
    v: &X,
    schedule: &StepSchedule,
    source_norm: &(dyn Fn(&X) -> f64 + Sync),
) -> Result<Y>
where
    X: Vector,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + ?Sized,
{
    let floor = f64::EPSILON.sqrt() * (1.0 + source_norm(x));
    directional_derivative_at(f, x, v, schedule.finest().max(floor))
}

pub fn estimate_derivative<X, Y, F>(
    f: &F,
    x: &X,
    directions: &[X],
    schedule: &StepSchedule,
    source_norm: &(dyn Fn(&X) -> f64 + Sync),
) -> Result<DerivativeEstimate<X, Y>>
where
    X: Vector,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + Sync + ?Sized,
{
    let values = directions
        .par_iter()
        .map(|v| directional_derivative(f, x, v, schedule, source_norm))
        .collect::<Result<Vec<Y>>>()?;
    Ok(DerivativeEstimate {
        base_point: x.clone(),
        directions: directions.to_vec(),
        values,
        step_schedule: schedule.clone(),
        richardson_order: 1,
    })
}

/// `count` seeded random directions shaped like `x`, normalized in `norm`.
pub fn random_directions<X>(x: &X, count: usize, seed: u64, norm: &(dyn Fn(&X) -> f64 + Sync)) -> Vec<X>
where
    X: Vector + RandomLike,
{
    (0..count)
        .map(|i| {
            let v = x.random_like(&mut sample_rng(seed, i as u64), 1.0);
            let n = norm(&v);
            v.scaled(1.0 / n)
        })
        .collect()
}

/// A sequence `h_n → h` matched to the steps `t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HSequence<X> {
    pub limit: X,
    pub members: Vec<X>,
}

impl<X: Vector> HSequence<X> {
    /// `h_n = h + t_n·w`.
    pub fn perturbed(limit: X, w: &X, steps: &[f64]) -> Self {
        let members = steps.iter().map(|&t| limit.add_scaled(t.abs(), w)).collect();
        Self { limit, members }
    }

    pub fn constant(limit: X, len: usize) -> Self {
        Self {
            members: vec![limit.clone(); len],
            limit,
        }
    }
}

/// Least-squares slope of `log ratio` against `log |t|` over the points above
/// `floor`; `None` with fewer than two such points.
pub fn fit_slope(steps: &[f64], ratios: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(ratios)
        .filter(|(_, &r)| r > floor)
        .map(|(t, r)| (t.abs().ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// A series passes if its last ratio is below `thresholds.ratio` and it
/// either decays with slope `≥ thresholds.slope` or has reached the floor.
fn series_passes(slope: Option<f64>, last: f64, floor: f64, thresholds: &Thresholds) -> bool {
    if last.is_nan() || last > thresholds.ratio {
        return false;
    }
    last <= floor || slope.is_some_and(|s| s >= thresholds.slope)
}

struct Series {
    steps: Vec<f64>,
    ratios: Vec<f64>,
}

fn assemble(
    notion: Notion,
    series: Vec<Series>,
    floor: f64,
    thresholds: &Thresholds,
    radius: Option<f64>,
    seed: Option<u64>,
) -> DifferentiabilityReport {
    let mut rows = Vec::new();
    for (id, s) in series.iter().enumerate() {
        for (&t, &r) in s.steps.iter().zip(&s.ratios) {
            rows.push(RatioRow { direction_id: id, t, ratio: r });
        }
    }
    let judged: Vec<Series> = if notion == Notion::Bounded && !series.is_empty() {
        // Uniformity over S: the sup over directions at each step.
        let steps = series[0].steps.clone();
        let sup = (0..steps.len())
            .map(|i| series.iter().map(|s| s.ratios[i]).fold(0.0, f64::max))
            .collect();
        vec![Series { steps, ratios: sup }]
    } else {
        series
    };
    let slopes: Vec<Option<f64>> = judged
        .iter()
        .map(|s| fit_slope(&s.steps, &s.ratios, floor))
        .collect();
    let finals: Vec<f64> = judged
        .iter()
        .map(|s| *s.ratios.last().unwrap_or(&f64::NAN))
        .collect();
    let pass = !judged.is_empty()
        && slopes
            .iter()
            .zip(&finals)
            .all(|(&s, &l)| series_passes(s, l, floor, thresholds));
    DifferentiabilityReport {
        notion,
        disclaimer: report::DISCLAIMER.to_string(),
        ratios: rows,
        decay_slopes: slopes,
        final_ratio: finals.iter().copied().fold(0.0, f64::max),
        noise_floor: floor,
        slope_threshold: thresholds.slope,
        ratio_threshold: thresholds.ratio,
        set_radius: radius,
        seed,
        pass,
    }
}

/// Bounded differentiability: `‖r(t h)‖/t → 0` uniformly over the bounded set `S`.
pub fn check_bounded<X, Y, F>(
    f: &F,
    x: &X,
    set: &[X],
    schedule: &StepSchedule,
    norms: NormPair<'_, X, Y>,
    thresholds: &Thresholds,
) -> Result<DifferentiabilityReport>
where
    X: Vector,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + Sync + ?Sized,
{
    let fx = f(x)?;
    let floor = thresholds.noise_rel * (1.0 + (norms.target)(&fx));
    let radius = set.iter().map(|h| (norms.source)(h)).fold(0.0, f64::max);
    let series = set
        .par_iter()
        .map(|h| {
            let ah = directional_derivative(f, x, h, schedule, norms.source)?;
            let ratios = schedule
                .steps()
                .iter()
                .map(|&t| remainder_ratio(f, x, &fx, h, &ah, t, t, norms.target))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Series {
                steps: schedule.steps().to_vec(),
                ratios,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(Notion::Bounded, series, floor, thresholds, Some(radius), None))
}

/// `‖f(x + t h_step) - f(x) - t·A·h_lin‖ / |t|`.
#[allow(clippy::too_many_arguments)]
fn remainder_ratio<X, Y, F>(
    f: &F,
    x: &X,
    fx: &Y,
    h_step: &X,
    a_h_lin: &Y,
    t: f64,
    scale: f64,
    target: &(dyn Fn(&Y) -> f64 + Sync),
) -> Result<f64>
where
    X: Vector,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + ?Sized,
{
    let moved = f(&x.add_scaled(t, h_step))?;
    let r = moved.sub(fx).add_scaled(-t, a_h_lin);
    Ok(target(&r) / scale.abs())
}

/// Compact differentiability: `f(x + t_n h_n) - f(x) = t_n A h + o(t_n)` for `h_n → h`,
/// `t_n → 0` (either sign).
pub fn check_compact<X, Y, F>(
    f: &F,
    x: &X,
    sequences: &[HSequence<X>],
    t_sequence: &[f64],
    schedule: &StepSchedule,
    norms: NormPair<'_, X, Y>,
    thresholds: &Thresholds,
) -> Result<DifferentiabilityReport>
where
    X: Vector,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + Sync + ?Sized,
{
    if t_sequence.iter().any(|t| *t == 0.0 || !t.is_finite()) {
        return Err(argument("t_n must be nonzero and finite"));
    }
    if sequences.iter().any(|s| s.members.len() != t_sequence.len()) {
        return Err(argument("each h-sequence needs one member per t_n"));
    }
    let fx = f(x)?;
    let floor = thresholds.noise_rel * (1.0 + (norms.target)(&fx));
    let series = sequences
        .par_iter()
        .map(|s| {
            let ah = directional_derivative(f, x, &s.limit, schedule, norms.source)?;
            let ratios = t_sequence
                .iter()
                .zip(&s.members)
                .map(|(&t, hn)| remainder_ratio(f, x, &fx, hn, &ah, t, t, norms.target))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Series {
                steps: t_sequence.to_vec(),
                ratios,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(Notion::Compact, series, floor, thresholds, None, None))
}

/// Fréchet differentiability: `‖r(h)‖_Y / ‖h‖_X → 0` over seeded random `h` with norms
/// following the schedule.
pub fn check_frechet<X, Y, F>(
    f: &F,
    x: &X,
    schedule: &StepSchedule,
    norms: NormPair<'_, X, Y>,
    sample_budget: usize,
    rng_seed: u64,
    thresholds: &Thresholds,
) -> Result<DifferentiabilityReport>
where
    X: Vector + RandomLike,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + Sync + ?Sized,
{
    let fx = f(x)?;
    let floor = thresholds.noise_rel * (1.0 + (norms.target)(&fx));
    let directions = random_directions(x, sample_budget, rng_seed, norms.source);
    let series = directions
        .par_iter()
        .map(|v| {
            let av = directional_derivative(f, x, v, schedule, norms.source)?;
            let ratios = schedule
                .steps()
                .iter()
                .map(|&r| remainder_ratio(f, x, &fx, v, &av, r, (norms.source)(&v.scaled(r)), norms.target))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Series {
                steps: schedule.steps().to_vec(),
                ratios,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(Notion::Frechet, series, floor, thresholds, None, Some(rng_seed)))
}

/// Compares `D(f∘g)(x)·v` with `Df(g(x))·(Dg(x)·v)` per direction; the error
/// is `‖lhs - rhs‖ / max(1, ‖rhs‖)`.
#[allow(clippy::too_many_arguments)]
pub fn check_chain_rule<X, Y, Z, F, G>(
    f: &F,
    g: &G,
    x: &X,
    directions: &[X],
    schedule: &StepSchedule,
    source_norm: &(dyn Fn(&X) -> f64 + Sync),
    middle_norm: &(dyn Fn(&Y) -> f64 + Sync),
    target_norm: &(dyn Fn(&Z) -> f64 + Sync),
) -> Result<ChainRuleReport>
where
    X: Vector,
    Y: Vector,
    Z: Vector,
    F: Fn(&Y) -> Result<Z> + Sync + ?Sized,
    G: Fn(&X) -> Result<Y> + Sync + ?Sized,
{
    let composed = |y: &X| -> Result<Z> { f(&g(y)?) };
    let gx = g(x)?;
    let errors = directions
        .par_iter()
        .map(|v| {
            let lhs: Z = directional_derivative(&composed, x, v, schedule, source_norm)?;
            let dg: Y = directional_derivative(g, x, v, schedule, source_norm)?;
            let rhs: Z = directional_derivative(f, &gx, &dg, schedule, middle_norm)?;
            Ok(target_norm(&lhs.sub(&rhs)) / target_norm(&rhs).max(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(ChainRuleReport {
        disclaimer: report::DISCLAIMER.to_string(),
        errors,
        max_error,
        tolerance: CHAIN_RULE_TOLERANCE,
        pass: max_error <= CHAIN_RULE_TOLERANCE,
    })
}

/// The three notions at `x` with `directions` seeded unit directions: the
/// bounded set is the directions themselves, the compact sequences are
/// `h_n = h + |t_n|·w` with `w` drawn from a shifted seed.
pub fn check_all_notions<X, Y, F>(
    f: &F,
    x: &X,
    schedule: &StepSchedule,
    norms: NormPair<'_, X, Y>,
    directions: usize,
    rng_seed: u64,
    thresholds: &Thresholds,
) -> Result<[DifferentiabilityReport; 3]>
where
    X: Vector + RandomLike,
    Y: Vector,
    F: Fn(&X) -> Result<Y> + Sync + ?Sized,
{
    let set = random_directions(x, directions, rng_seed, norms.source);
    let shifts = random_directions(x, directions, rng_seed.wrapping_add(1 << 32), norms.source);
    let sequences: Vec<HSequence<X>> = set
        .iter()
        .zip(&shifts)
        .map(|(h, w)| HSequence::perturbed(h.clone(), w, schedule.steps()))
        .collect();
    Ok([
        check_bounded(f, x, &set, schedule, norms, thresholds)?,
        check_compact(f, x, &sequences, schedule.steps(), schedule, norms, thresholds)?,
        check_frechet(f, x, schedule, norms, directions, rng_seed, thresholds)?,
    ])
}

#[cfg(test)]
mod tests;
