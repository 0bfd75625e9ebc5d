use serde::{Deserialize, Serialize};

use super::quadrature::{factorial, iterated_integral, iterated_integral_on_grid, powi};
use super::GridFunction;
use crate::error::{argument, BlidError, Result};

/// An element of a discretized `C^q` space: the jet
/// `(x(0), x'(0), …, x^{(q-1)}(0))` plus samples of `x^{(q)}`.
///
/// Lower derivatives are rebuilt by repeated integration from 0, never by
/// differencing samples. `q = 0` degenerates to a plain grid function held
/// in `top`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJet")]
pub struct JetGridFunction {
    q: usize,
    jet: Vec<f64>,
    top: GridFunction,
}

#[derive(Deserialize)]
struct RawJet {
    q: usize,
    jet: Vec<f64>,
    top: GridFunction,
}

impl TryFrom<RawJet> for JetGridFunction {
    type Error = BlidError;

    fn try_from(raw: RawJet) -> Result<Self> {
        JetGridFunction::new(raw.q, raw.jet, raw.top)
    }
}

impl JetGridFunction {
    pub fn new(q: usize, jet: Vec<f64>, top: GridFunction) -> Result<Self> {
        if jet.len() != q {
            return Err(argument(format!(
                "jet of order {q} needs {q} values, got {}",
                jet.len()
            )));
        }
        if jet.iter().any(|v| !v.is_finite()) {
            return Err(argument("jet values must be finite"));
        }
        if top.is_discrete() {
            return Err(argument("jet functions need a continuum grid"));
        }
        if top.node_index(0.0).is_none() {
            return Err(argument(format!(
                "0 must be a grid node of [{}, {}]",
                top.lo(),
                top.hi()
            )));
        }
        Ok(Self { q, jet, top })
    }

    pub fn zero(q: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(q, vec![0.0; q], GridFunction::constant(lo, hi, n, 0.0)?)
    }

    /// Builds the representation of a function from its derivatives:
    /// `derivs[j]` is `x^{(j)}` for `j = 0..=q`; only `x^{(j)}(0)` for
    /// `j < q` and the samples of `x^{(q)}` are kept.
    pub fn from_derivatives(
        q: usize,
        lo: f64,
        hi: f64,
        n: usize,
        derivs: &[&dyn Fn(f64) -> f64],
    ) -> Result<Self> {
        if derivs.len() != q + 1 {
            return Err(argument("need q + 1 derivative closures"));
        }
        let jet = derivs[..q].iter().map(|d| d(0.0)).collect();
        Self::new(q, jet, GridFunction::from_fn(lo, hi, n, derivs[q])?)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn jet(&self) -> &[f64] {
        &self.jet
    }

    pub fn top(&self) -> &GridFunction {
        &self.top
    }

    pub fn lo(&self) -> f64 {
        self.top.lo()
    }

    pub fn hi(&self) -> f64 {
        self.top.hi()
    }

    pub fn same_layout(&self, other: &JetGridFunction) -> bool {
        self.q == other.q && self.top.same_grid(&other.top)
    }

    /// Grid samples of `x^{(j)}`:
    /// `Σ_{i=j}^{q-1} t^{i-j}/(i-j)! · jet[i] + I_{q-j}(top)(t)`.
    pub fn reconstruct(&self, j: usize) -> Result<GridFunction> {
        if j > self.q {
            return Err(argument(format!(
                "derivative order {j} exceeds representation order {}",
                self.q
            )));
        }
        if j == self.q {
            return Ok(self.top.clone());
        }
        let integral = iterated_integral_on_grid(&self.top, self.q - j)?;
        let samples = self
            .top
            .nodes()
            .zip(integral.samples())
            .map(|(t, &tail)| self.jet_polynomial(j, t) + tail)
            .collect();
        Ok(self.top.with_samples(samples))
    }

    /// All orders `0..=q` at once.
    pub fn reconstruct_all(&self) -> Vec<GridFunction> {
        (0..=self.q)
            .map(|j| self.reconstruct(j).expect("order within range"))
            .collect()
    }

    /// `x^{(j)}(t)` at a single point, straight from the defining formula.
    pub fn value_at(&self, j: usize, t: f64) -> Result<f64> {
        if j > self.q {
            return Err(argument(format!(
                "derivative order {j} exceeds representation order {}",
                self.q
            )));
        }
        if j == self.q {
            return self.top.eval(t);
        }
        Ok(self.jet_polynomial(j, t) + iterated_integral(&self.top, self.q - j, t)?)
    }

    fn jet_polynomial(&self, j: usize, t: f64) -> f64 {
        (j..self.q)
            .map(|i| powi(t, i - j) / factorial(i - j) * self.jet[i])
            .sum()
    }

    /// The same function seen as an element of `C^p`, `p ≤ q`.
    pub fn lower_order(&self, p: usize) -> Result<JetGridFunction> {
        let top = self.reconstruct(p)?;
        Ok(JetGridFunction {
            q: p,
            jet: self.jet[..p].to_vec(),
            top,
        })
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> JetGridFunction {
        JetGridFunction {
            q: self.q,
            jet: self.jet.iter().map(|&v| f(v)).collect(),
            top: self.top.map(f),
        }
    }

    pub fn try_add_scaled(&self, alpha: f64, other: &JetGridFunction) -> Result<JetGridFunction> {
        if !self.same_layout(other) {
            return Err(argument("jet functions have different orders or grids"));
        }
        Ok(JetGridFunction {
            q: self.q,
            jet: self
                .jet
                .iter()
                .zip(&other.jet)
                .map(|(a, b)| a + alpha * b)
                .collect(),
            top: self.top.zip_with(&other.top, |a, b| a + alpha * b)?,
        })
    }

    /// `max(|jet_j|, sup |top|)`: the quantity the blid formula acts on.
    pub fn governing_norm(&self) -> f64 {
        self.jet
            .iter()
            .map(|v| v.abs())
            .fold(super::norm_sup(&self.top), f64::max)
    }

    /// Largest difference between `self` and `other` on the data a
    /// representation of order `p = min(q, other.q)` holds: the first `p`
    /// jet entries and the samples of the `p`-th derivative.
    pub fn represented_deviation(&self, other: &JetGridFunction) -> Result<f64> {
        if !self.top.same_grid(&other.top) {
            return Err(argument("jet functions live on different grids"));
        }
        let p = self.q.min(other.q);
        let a = self.reconstruct(p)?;
        let b = other.reconstruct(p)?;
        let jet_dev = self.jet[..p]
            .iter()
            .zip(&other.jet[..p])
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let top_dev = a
            .samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        Ok(jet_dev.max(top_dev))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_identity_function() {
        let x = JetGridFunction::new(1, vec![0.0], GridFunction::constant(0.0, 1.0, 64, 1.0).unwrap())
            .unwrap();
        let r = x.reconstruct(0).unwrap();
        for (t, v) in r.nodes().zip(r.samples()) {
            assert!((v - t).abs() < 1e-14);
        }
    }

    #[test]
    fn top_order_is_verbatim() {
        let top = GridFunction::from_fn(0.0, 1.0, 16, |t| t.sin()).unwrap();
        let x = JetGridFunction::new(2, vec![0.1, 0.2], top.clone()).unwrap();
        assert_eq!(x.reconstruct(2).unwrap(), top);
    }

    #[test]
    fn quadratic_from_jet() {
        // x = 1 + 2t + 3t².
        let x = JetGridFunction::new(2, vec![1.0, 2.0], GridFunction::constant(0.0, 1.0, 1024, 6.0).unwrap())
            .unwrap();
        let r0 = x.reconstruct(0).unwrap();
        for (t, v) in r0.nodes().zip(r0.samples()) {
            assert!((v - (1.0 + 2.0 * t + 3.0 * t * t)).abs() < 1e-9);
        }
        let r1 = x.reconstruct(1).unwrap();
        for (t, v) in r1.nodes().zip(r1.samples()) {
            assert!((v - (2.0 + 6.0 * t)).abs() < 1e-9);
        }
    }

    #[test]
    fn order_above_q_is_argument_error() {
        let x = JetGridFunction::zero(2, 0.0, 1.0, 8).unwrap();
        assert!(matches!(x.reconstruct(3), Err(BlidError::Argument(_))));
    }

    #[test]
    fn base_point_value_is_jet() {
        let x = JetGridFunction::new(3, vec![0.7, -1.0, 2.0], GridFunction::from_fn(-1.0, 1.0, 100, |t| t.cos()).unwrap())
            .unwrap();
        let r = x.reconstruct(0).unwrap();
        let z = r.node_index(0.0).unwrap();
        assert!((r.samples()[z] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_must_be_a_node() {
        let top = GridFunction::constant(-1.0, 2.0, 7, 0.0).unwrap();
        assert!(JetGridFunction::new(0, vec![], top).is_err());
    }

    #[test]
    fn lower_order_keeps_represented_data() {
        let x = JetGridFunction::new(3, vec![0.2, 0.3, -0.1], GridFunction::from_fn(0.0, 1.0, 128, |t| t * t).unwrap())
            .unwrap();
        let low = x.lower_order(1).unwrap();
        assert_eq!(low.q(), 1);
        assert_eq!(x.represented_deviation(&low).unwrap(), 0.0);
    }

    #[test]
    fn json_shape() {
        let x = JetGridFunction::new(1, vec![0.5], GridFunction::constant(0.0, 1.0, 2, 1.0).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&x).unwrap();
        assert_eq!(v["q"], 1);
        assert_eq!(v["jet"][0], 0.5);
        assert_eq!(v["top"]["samples"].as_array().unwrap().len(), 3);
        let back: JetGridFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
    }
}
