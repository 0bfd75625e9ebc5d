use serde::{Deserialize, Serialize};

use super::{GridFunction, JetGridFunction};
use crate::error::{argument, Result};

/// Which norm (or countable norm family) a space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `sup_T |x|` on bounded continuous functions.
    SupOnT,
    /// `max_{j ≤ q} sup_{[0,1]} |x^{(j)}|` on `C^q[0,1]`.
    CqInterval,
    /// `‖x‖_k = max_{j ≤ k} sup_{[0,1]} |x^{(j)}|` on `C^∞[0,1]`.
    CInfInterval,
    /// `‖x‖_k = max_{j ≤ k} max_{[-k,k]} |x^{(j)}|` on `C^∞(ℝ)`.
    WindowedRealLine,
    /// `‖x‖_k = max_{l ≤ q} max_{[-k,k]} |x^{(l)}|` on `C^q(ℝ)`; `q` is `q_cap`.
    CqRealLine,
}

impl NormKind {
    pub fn is_real_line(self) -> bool {
        matches!(self, NormKind::WindowedRealLine | NormKind::CqRealLine)
    }

    pub fn is_family(self) -> bool {
        matches!(
            self,
            NormKind::CInfInterval | NormKind::WindowedRealLine | NormKind::CqRealLine
        )
    }
}

/// A norm family together with its truncation indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormFamilyDescriptor {
    pub kind: NormKind,
    /// Highest derivative order represented for `C^∞` spaces (the `q` of `C^q(ℝ)`).
    pub q_cap: usize,
    /// Number of norms kept in the metric; real-line domains are `[-k_max, k_max]`.
    pub k_max: usize,
}

pub const DEFAULT_Q_CAP: usize = 6;
pub const DEFAULT_K_MAX: usize = 20;
pub const DEFAULT_INTERVALS: usize = 1024;
/// Real-line grids use `REAL_LINE_NODES_PER_UNIT` intervals per unit length so
/// every integer window end is a node.
pub const REAL_LINE_NODES_PER_UNIT: usize = 26;

/// Domain and resolution of the grids representing a space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub lo: f64,
    pub hi: f64,
    pub intervals: usize,
}

impl GridLayout {
    pub fn unit_interval() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            intervals: DEFAULT_INTERVALS,
        }
    }
}

impl NormFamilyDescriptor {
    pub fn new(kind: NormKind, q_cap: usize, k_max: usize) -> Result<Self> {
        if k_max < 1 {
            return Err(argument("k_max must be at least 1"));
        }
        Ok(Self { kind, q_cap, k_max })
    }

    pub fn with_defaults(kind: NormKind) -> Self {
        Self {
            kind,
            q_cap: DEFAULT_Q_CAP,
            k_max: DEFAULT_K_MAX,
        }
    }

    /// `[0,1]` with 1024 intervals, or `[-k_max, k_max]` at 26 intervals per unit.
    pub fn layout(&self) -> GridLayout {
        if self.kind.is_real_line() {
            let k = self.k_max as f64;
            GridLayout {
                lo: -k,
                hi: k,
                intervals: 2 * self.k_max * REAL_LINE_NODES_PER_UNIT,
            }
        } else {
            GridLayout::unit_interval()
        }
    }

    /// Highest derivative order entering `‖·‖_k` for a representation of
    /// order `repr_q`.
    pub fn order_for(&self, k: usize, repr_q: usize) -> usize {
        match self.kind {
            NormKind::SupOnT => 0,
            NormKind::CqInterval => repr_q,
            NormKind::CqRealLine => self.q_cap.min(repr_q),
            NormKind::CInfInterval | NormKind::WindowedRealLine => k.min(self.q_cap).min(repr_q),
        }
    }

    /// Window `[a, b]` of `‖·‖_k`, before clamping to the grid.
    pub fn window(&self, k: usize) -> Option<(f64, f64)> {
        self.kind.is_real_line().then(|| (-(k as f64), k as f64))
    }
}

pub fn norm_sup(f: &GridFunction) -> f64 {
    f.samples().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `max_{j ≤ q} sup |x^{(j)}|`.
pub fn norm_q(x: &JetGridFunction) -> f64 {
    x.reconstruct_all().iter().map(norm_sup).fold(0.0, f64::max)
}

/// `‖x‖_k` for the family `d`. Windows are clamped to the grid and derivative
/// orders above the representation are truncated.
pub fn norm_windowed(x: &JetGridFunction, k: usize, d: &NormFamilyDescriptor) -> f64 {
    let derivs = x.reconstruct_all();
    windowed_from_derivatives(&derivs, k, d)
}

fn windowed_from_derivatives(derivs: &[GridFunction], k: usize, d: &NormFamilyDescriptor) -> f64 {
    let top_order = d.order_for(k, derivs.len() - 1);
    let window = d.window(k);
    derivs[..=top_order]
        .iter()
        .map(|g| match window {
            Some((a, b)) => window_sup(g, a, b),
            None => norm_sup(g),
        })
        .fold(0.0, f64::max)
}

/// Largest `|g|` over `[a, b] ∩ [lo, hi]`, window ends interpolated.
pub fn window_sup(g: &GridFunction, a: f64, b: f64) -> f64 {
    let a = a.max(g.lo());
    let b = b.min(g.hi());
    if a > b {
        return 0.0;
    }
    let mut best = g.interpolate(a).abs().max(g.interpolate(b).abs());
    for (t, v) in g.nodes().zip(g.samples()) {
        if t >= a && t <= b {
            best = best.max(v.abs());
        }
    }
    best
}

/// All truncated norms `‖x‖_k`, `k = 0..k_max`.
pub fn windowed_norms(x: &JetGridFunction, d: &NormFamilyDescriptor) -> Vec<f64> {
    let derivs = x.reconstruct_all();
    (0..d.k_max)
        .map(|k| windowed_from_derivatives(&derivs, k, d))
        .collect()
}

/// `Σ_{k=0}^{k_max-1} 2^{-k} ‖x - y‖_k / (1 + ‖x - y‖_k)`.
///
/// The omitted tail is below [`metric_tail_bound`].
pub fn frechet_metric(x: &JetGridFunction, y: &JetGridFunction, d: &NormFamilyDescriptor) -> Result<f64> {
    if !x.same_layout(y) {
        return Err(argument(
            "metric needs elements of the same order on the same grid",
        ));
    }
    let diff = x.try_add_scaled(-1.0, y)?;
    Ok(metric_from_norms(&windowed_norms(&diff, d)))
}

/// `d(x, 0)`.
pub fn frechet_distance_to_zero(x: &JetGridFunction, d: &NormFamilyDescriptor) -> f64 {
    metric_from_norms(&windowed_norms(x, d))
}

pub fn metric_from_norms(norms: &[f64]) -> f64 {
    norms
        .iter()
        .enumerate()
        .map(|(k, &n)| 0.5f64.powi(k as i32) * n / (n + 1.0))
        .sum()
}

/// Upper bound on the neglected terms `Σ_{k ≥ k_max} 2^{-k}`.
pub fn metric_tail_bound(k_max: usize) -> f64 {
    0.5f64.powi(k_max as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(q: usize, jet: Vec<f64>, lo: f64, hi: f64, n: usize, top: impl Fn(f64) -> f64) -> JetGridFunction {
        JetGridFunction::new(q, jet, GridFunction::from_fn(lo, hi, n, top).unwrap()).unwrap()
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(norm_sup(&GridFunction::constant(0.0, 1.0, 4, -3.0).unwrap()), 3.0);
        assert_eq!(norm_sup(&GridFunction::constant(0.0, 1.0, 4, 0.0).unwrap()), 0.0);
        let g = GridFunction::from_fn(0.0, 1.0, 1024, |t| t * t - t).unwrap();
        assert!((norm_sup(&g) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn cq_norm_of_t_squared() {
        let x = jet(2, vec![0.0, 0.0], 0.0, 1.0, 1024, |_| 2.0);
        assert!((norm_q(&x) - 2.0).abs() < 1e-12);
        assert_eq!(norm_q(&JetGridFunction::zero(2, 0.0, 1.0, 16).unwrap()), 0.0);
    }

    #[test]
    fn windowed_constant_and_identity() {
        let d = NormFamilyDescriptor::new(NormKind::WindowedRealLine, 6, 5).unwrap();
        let c = jet(1, vec![2.0], -5.0, 5.0, 260, |_| 0.0);
        for k in 0..=5 {
            assert!((norm_windowed(&c, k, &d) - 2.0).abs() < 1e-12);
        }
        let cq = NormFamilyDescriptor::new(NormKind::CqRealLine, 1, 3).unwrap();
        let id = jet(1, vec![0.0], -3.0, 3.0, 156, |_| 1.0);
        assert!((norm_windowed(&id, 2, &cq) - 2.0).abs() < 1e-12);
        assert_eq!(norm_windowed(&JetGridFunction::zero(2, -3.0, 3.0, 60).unwrap(), 2, &cq), 0.0);
    }

    #[test]
    fn cinf_interval_orders_grow_with_k() {
        let d = NormFamilyDescriptor::new(NormKind::CInfInterval, 6, 20).unwrap();
        // x = 5 t²/2: sup|x| = 2.5, sup|x'| = 5, |x''| = 5.
        let x = jet(2, vec![0.0, 0.0], 0.0, 1.0, 512, |_| 5.0);
        assert!((norm_windowed(&x, 0, &d) - 2.5).abs() < 1e-9);
        assert!((norm_windowed(&x, 1, &d) - 5.0).abs() < 1e-9);
        assert!((norm_windowed(&x, 9, &d) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn metric_geometric_series() {
        let norms = vec![1.0; 20];
        assert!((metric_from_norms(&norms) - (1.0 - 0.5f64.powi(20))).abs() < 1e-12);
    }

    #[test]
    fn metric_identical_is_zero_and_incompatible_errors() {
        let d = NormFamilyDescriptor::with_defaults(NormKind::CInfInterval);
        let x = jet(2, vec![0.3, 0.1], 0.0, 1.0, 64, |t| t.sin());
        assert_eq!(frechet_metric(&x, &x, &d).unwrap(), 0.0);
        let y = jet(1, vec![0.3], 0.0, 1.0, 64, |t| t.sin());
        assert!(frechet_metric(&x, &y, &d).is_err());
    }

    #[test]
    fn real_line_layout_has_integer_nodes() {
        let d = NormFamilyDescriptor::with_defaults(NormKind::WindowedRealLine);
        let l = d.layout();
        let g = GridFunction::constant(l.lo, l.hi, l.intervals, 0.0).unwrap();
        for k in 0..=20 {
            assert!(g.node_index(k as f64).is_some());
            assert!(g.node_index(-(k as f64)).is_some());
        }
    }
}
