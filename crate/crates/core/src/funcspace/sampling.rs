//! Seeded random elements for certification and fuzzing.
//!
//! Every sample draws from its own generator seeded with `seed + index`, so
//! results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{euclidean_norm, norm_sup, GridFunction, GridLayout, JetGridFunction};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

/// Amplitude levels `10^-2, 10^-1, …, 10^6`, cycled by sample index.
pub fn stratified_amplitude(index: usize) -> f64 {
    10f64.powi((index % 9) as i32 - 2)
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// A random trigonometric polynomial on the layout with `sup |x| = amplitude`.
pub fn random_smooth_grid<R: Rng>(rng: &mut R, layout: &GridLayout, amplitude: f64) -> GridFunction {
    let modes: Vec<(f64, f64)> = (0..5)
        .map(|m| {
            (
                rng.gen_range(-1.0..1.0) / (1.0 + m as f64),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let width = layout.hi - layout.lo;
    let raw = GridFunction::from_fn(layout.lo, layout.hi, layout.intervals, |t| {
        let s = (t - layout.lo) / width;
        modes
            .iter()
            .enumerate()
            .map(|(m, (c, phase))| c * (std::f64::consts::PI * m as f64 * s + phase).cos())
            .sum()
    })
    .expect("valid layout");
    let sup = norm_sup(&raw);
    if sup == 0.0 {
        return raw.map(|_| amplitude);
    }
    raw.map(|v| v * amplitude / sup)
}

/// A random `C^q` element with `max(|jet_j|, sup|top|) = amplitude`.
pub fn random_jet<R: Rng>(rng: &mut R, q: usize, layout: &GridLayout, amplitude: f64) -> JetGridFunction {
    let jet: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let top_amp = rng.gen_range(0.1..1.0);
    let top = random_smooth_grid(rng, layout, top_amp);
    let x = JetGridFunction::new(q, jet, top).expect("layout has 0 as a node");
    let g = x.governing_norm();
    x.map_values(|v| v * amplitude / g)
}

/// A random vector of Euclidean norm `amplitude`.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize, amplitude: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = euclidean_norm(&v);
        if norm > 1e-3 {
            return v.iter().map(|x| x * amplitude / norm).collect();
        }
    }
}

/// Random elements with the same layout as a template.
pub trait RandomLike: Sized {
    /// A random element shaped like `self` with governing size `amplitude`.
    fn random_like<R: Rng>(&self, rng: &mut R, amplitude: f64) -> Self;
}

impl RandomLike for GridFunction {
    fn random_like<R: Rng>(&self, rng: &mut R, amplitude: f64) -> Self {
        if self.is_discrete() {
            let values = (0..self.samples().len())
                .map(|_| amplitude * rng.gen_range(-1.0..1.0))
                .collect();
            return self.with_samples(values);
        }
        let layout = GridLayout {
            lo: self.lo(),
            hi: self.hi(),
            intervals: self.intervals(),
        };
        random_smooth_grid(rng, &layout, amplitude)
    }
}

impl RandomLike for JetGridFunction {
    fn random_like<R: Rng>(&self, rng: &mut R, amplitude: f64) -> Self {
        let layout = GridLayout {
            lo: self.lo(),
            hi: self.hi(),
            intervals: self.top().intervals(),
        };
        random_jet(rng, self.q(), &layout, amplitude)
    }
}

impl RandomLike for Vec<f64> {
    fn random_like<R: Rng>(&self, rng: &mut R, amplitude: f64) -> Self {
        random_vector(rng, self.len(), amplitude)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sample() {
        let layout = GridLayout::unit_interval();
        let a = random_jet(&mut sample_rng(7, 3), 2, &layout, 5.0);
        let b = random_jet(&mut sample_rng(7, 3), 2, &layout, 5.0);
        assert_eq!(a, b);
        assert!((a.governing_norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn amplitudes_cover_eight_decades() {
        let levels: Vec<f64> = (0..9).map(stratified_amplitude).collect();
        assert_eq!(levels[0], 1e-2);
        assert_eq!(levels[8], 1e6);
    }

    #[test]
    fn vector_has_requested_norm() {
        let v = random_vector(&mut sample_rng(1, 0), 3, 2.5);
        assert!((euclidean_norm(&v) - 2.5).abs() < 1e-12);
    }
}
