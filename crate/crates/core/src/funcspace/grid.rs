use serde::{Deserialize, Serialize};

use crate::error::{argument, BlidError, Result};

/// Samples of a real function on `n + 1` uniform nodes of `[lo, hi]`.
///
/// A grid flagged `discrete` stands for a finite set `T = {t_0, …, t_n}`:
/// evaluation is only legal at the nodes and nothing is interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    samples: Vec<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    discrete: bool,
}

#[derive(Deserialize)]
struct RawGrid {
    lo: f64,
    hi: f64,
    samples: Vec<f64>,
    #[serde(default)]
    discrete: bool,
}

impl TryFrom<RawGrid> for GridFunction {
    type Error = BlidError;

    fn try_from(raw: RawGrid) -> Result<Self> {
        let mut g = GridFunction::new(raw.lo, raw.hi, raw.samples)?;
        g.discrete = raw.discrete;
        Ok(g)
    }
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, samples: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(argument(format!("grid requires lo < hi, got [{lo}, {hi}]")));
        }
        if samples.len() < 3 {
            return Err(argument(format!(
                "grid requires at least 3 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(argument(format!("sample {i} is not finite")));
        }
        Ok(Self {
            lo,
            hi,
            samples,
            discrete: false,
        })
    }

    /// Samples `f` on `n` uniform intervals (`n + 1` nodes).
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(argument("grid requires at least 2 intervals"));
        }
        let h = (hi - lo) / n as f64;
        let samples = (0..=n).map(|i| f(node_at(lo, hi, h, n, i))).collect();
        Self::new(lo, hi, samples)
    }

    pub fn constant(lo: f64, hi: f64, n: usize, value: f64) -> Result<Self> {
        Self::from_fn(lo, hi, n, |_| value)
    }

    /// A function on the finite set `{0, 1, …, m - 1}`.
    pub fn discrete(values: Vec<f64>) -> Result<Self> {
        let hi = values.len().saturating_sub(1) as f64;
        let mut g = Self::new(0.0, hi, values)?;
        g.discrete = true;
        Ok(g)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_discrete(&self) -> bool {
        self.discrete
    }

    /// Number of intervals `n`.
    pub fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.intervals() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node_at(self.lo, self.hi, self.spacing(), self.intervals(), i)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| self.node(i))
    }

    /// Index of the node at `t`, if `t` is a node up to round-off.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let pos = (t - self.lo) / self.spacing();
        let i = pos.round();
        if i < 0.0 || i > self.intervals() as f64 {
            return None;
        }
        ((pos - i).abs() <= 1e-9).then_some(i as usize)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    /// Piecewise-linear interpolant, exact at the nodes.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.contains(t) {
            return Err(BlidError::Domain(format!(
                "t = {t} outside [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.discrete {
            return self
                .node_index(t)
                .map(|i| self.samples[i])
                .ok_or_else(|| BlidError::Domain(format!("t = {t} is not a point of the finite set")));
        }
        Ok(self.interpolate(t))
    }

    pub(crate) fn interpolate(&self, t: f64) -> f64 {
        let n = self.intervals();
        let pos = ((t - self.lo) / self.spacing()).clamp(0.0, n as f64);
        let i = (pos.floor() as usize).min(n - 1);
        let w = pos - i as f64;
        if w == 0.0 {
            return self.samples[i];
        }
        if w == 1.0 {
            return self.samples[i + 1];
        }
        self.samples[i] * (1.0 - w) + self.samples[i + 1] * w
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.lo == other.lo
            && self.hi == other.hi
            && self.samples.len() == other.samples.len()
            && self.discrete == other.discrete
    }

    /// Pointwise image under `f` on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            lo: self.lo,
            hi: self.hi,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            discrete: self.discrete,
        }
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(argument("grid functions live on different grids"));
        }
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Same grid, new values. The caller keeps the length unchanged.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> GridFunction {
        debug_assert_eq!(samples.len(), self.samples.len());
        GridFunction {
            lo: self.lo,
            hi: self.hi,
            samples,
            discrete: self.discrete,
        }
    }

    pub fn zeros_like(&self) -> GridFunction {
        self.map(|_| 0.0)
    }
}

/// Node `i` of a uniform grid; the right endpoint is returned verbatim.
fn node_at(lo: f64, hi: f64, h: f64, n: usize, i: usize) -> f64 {
    if i == n {
        hi
    } else {
        lo + i as f64 * h
    }
}
