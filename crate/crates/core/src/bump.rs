//! Smooth real-line bump functions.
//!
//! `h(u) = σ((r_out - |u|) / (r_out - r_in))` with the smooth step
//! `σ(v) = g(v) / (g(v) + g(1 - v))`, `g(v) = exp(-1/v)` for `v > 0`.
//! `h` is exactly 1 on `|u| ≤ r_in` and exactly 0 on `|u| ≥ r_out`.

use serde::{Deserialize, Serialize};

use crate::error::{argument, BlidError, Result};

const SCAN_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BumpRadii")]
pub struct BumpFunction {
    r_in: f64,
    r_out: f64,
    /// `sup_u h(u)·u`.
    a: f64,
}

/// Serialized form; `a` is always recomputed from the radii.
#[derive(Debug, Clone, Copy, Deserialize)]
struct BumpRadii {
    r_in: f64,
    r_out: f64,
}

impl TryFrom<BumpRadii> for BumpFunction {
    type Error = BlidError;

    fn try_from(r: BumpRadii) -> Result<Self> {
        BumpFunction::new(r.r_in, r.r_out)
    }
}

impl Default for BumpFunction {
    fn default() -> Self {
        Self::new(1.0, 2.0).expect("valid default radii")
    }
}

impl BumpFunction {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in.is_finite() && r_out.is_finite() && 0.0 < r_in && r_in < r_out) {
            return Err(argument(format!(
                "bump radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})"
            )));
        }
        let mut h = Self { r_in, r_out, a: f64::NAN };
        h.a = bump_linear_bound(&h);
        Ok(h)
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    /// The certified linear bound `a = sup_u h(u)·u`.
    pub fn linear_bound(&self) -> f64 {
        self.a
    }

    fn transition(&self, u: f64) -> f64 {
        (self.r_out - u.abs()) / (self.r_out - self.r_in)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let au = u.abs();
        if au <= self.r_in {
            1.0
        } else if au >= self.r_out {
            0.0
        } else if u.is_nan() {
            f64::NAN
        } else {
            smooth_step(self.transition(u))
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        let au = u.abs();
        if au <= self.r_in || au >= self.r_out {
            return 0.0;
        }
        -u.signum() * smooth_step_deriv(self.transition(u)) / (self.r_out - self.r_in)
    }

    /// `u ↦ h(u)·u`, returning `u` itself on the identity branch.
    pub fn damp(&self, u: f64) -> f64 {
        if u.abs() <= self.r_in {
            u
        } else {
            self.eval(u) * u
        }
    }

    /// Derivative of [`damp`](Self::damp): `h(u) + u·h'(u)`.
    pub fn damp_deriv(&self, u: f64) -> f64 {
        self.eval(u) + u * self.deriv(u)
    }
}

/// `σ(v) = 1 / (1 + exp(1/v - 1/(1-v)))` on `0 < v < 1`, the overflow-safe
/// form of `g(v) / (g(v) + g(1-v))`.
fn smooth_step(v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    1.0 / (1.0 + (1.0 / v - 1.0 / (1.0 - v)).exp())
}

/// `σ'(v) = σ(1 - σ)(1/v² + 1/(1-v)²)`.
fn smooth_step_deriv(v: f64) -> f64 {
    if v <= 0.0 || v >= 1.0 {
        return 0.0;
    }
    let s = smooth_step(v);
    s * (1.0 - s) * (1.0 / (v * v) + 1.0 / ((1.0 - v) * (1.0 - v)))
}

/// `max_{u ∈ [0, r_out]} h(u)·u` by a 10⁴-point scan refined with golden
/// section search around the best scan point.
pub fn bump_linear_bound(h: &BumpFunction) -> f64 {
    let phi = |u: f64| h.eval(u) * u;
    let step = h.r_out / SCAN_POINTS as f64;
    let (best_i, best) = (0..=SCAN_POINTS)
        .map(|i| (i, phi(i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });

    let mut lo = (best_i.saturating_sub(1)) as f64 * step;
    let mut hi = ((best_i + 1).min(SCAN_POINTS)) as f64 * step;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = phi(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = phi(d);
        }
    }
    best.max(fc).max(fd).max(h.r_in)
}
