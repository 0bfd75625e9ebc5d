//! Tabulated solution of `Φ∘F = Λ∘Φ` with `Φ = id + u`.
//!
//! Work happens in spectral coordinates `y = V⁻¹x`, where `F` becomes
//! `G(y) = By + g(y)` with `B = diag(B_s, B_u)` and `g = V⁻¹ f̃(V ·)`. The
//! unknown `w = V⁻¹ u V` is stored on a uniform grid over `[−R, R]ⁿ` and
//! extended by zero outside the box; the grid has an odd node count so that
//! 0 is a node.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hyperbolic::{mat_vec, HyperbolicLinear};
use super::linalg::jacobian;
use crate::error::{argument, BlidError, Result};
use crate::funcspace::euclidean_norm;

pub type VectorMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

pub const MAX_DIMENSION: usize = 3;
/// Orbit steps used by [`ConjugacyResult::phi`] before falling back to the table.
pub const LIFT_STEPS: usize = 40;
/// `‖Φ(x) − x‖` below this is indistinguishable from rounding.
pub const BETA_NOISE_FLOOR: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 60;
const NEWTON_ACCEPT: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct BoxGrid {
    dim: usize,
    per_axis: usize,
    radius: f64,
    step: f64,
}

impl BoxGrid {
    fn new(dim: usize, per_axis: usize, radius: f64) -> Self {
        Self {
            dim,
            per_axis,
            radius,
            step: 2.0 * radius / (per_axis - 1) as f64,
        }
    }

    fn len(&self) -> usize {
        self.per_axis.pow(self.dim as u32)
    }

    fn center(&self) -> usize {
        (self.per_axis - 1) / 2
    }

    /// Node coordinates; the first axis varies slowest.
    fn node(&self, mut index: usize) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for d in (0..self.dim).rev() {
            let i = index % self.per_axis;
            index /= self.per_axis;
            y[d] = (i as f64 - self.center() as f64) * self.step;
        }
        y
    }

    /// Multilinear interpolation of components `comps` of the table, zero
    /// outside the box.
    fn interpolate(&self, table: &[f64], comps: &[usize], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; comps.len()];
        let mut base = [0usize; MAX_DIMENSION];
        let mut frac = [0.0f64; MAX_DIMENSION];
        for d in 0..self.dim {
            if y[d].is_nan() || y[d].abs() > self.radius {
                return out;
            }
            // Offset from the centre node keeps 0 exactly on a node.
            let s = y[d] / self.step + self.center() as f64;
            let i = (s.floor() as usize).min(self.per_axis - 2);
            base[d] = i;
            frac[d] = s - i as f64;
        }
        for corner in 0..(1usize << self.dim) {
            let mut weight = 1.0;
            let mut index = 0;
            for d in 0..self.dim {
                let up = (corner >> d) & 1 == 1;
                weight *= if up { frac[d] } else { 1.0 - frac[d] };
                index = index * self.per_axis + base[d] + usize::from(up);
            }
            if weight == 0.0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(comps) {
                *o += weight * table[index * self.dim + c];
            }
        }
        out
    }
}

/// `G`, `G⁻¹` and `g` in spectral coordinates.
#[derive(Clone)]
struct SpectralSystem {
    lin: HyperbolicLinear,
    f: VectorMap,
    stable: Vec<usize>,
    unstable: Vec<usize>,
}

fn select(y: &[f64], comps: &[usize]) -> Vec<f64> {
    comps.iter().map(|&c| y[c]).collect()
}

fn block_apply(m: &DMatrix<f64>, y: &[f64], comps: &[usize]) -> Vec<f64> {
    mat_vec(m, &select(y, comps))
}

impl SpectralSystem {
    fn new(lin: &HyperbolicLinear, f: VectorMap) -> Self {
        Self {
            stable: lin.stable_indices(),
            unstable: lin.unstable_indices(),
            lin: lin.clone(),
            f,
        }
    }

    fn g(&self, y: &[f64]) -> Vec<f64> {
        self.lin.to_spectral(&(self.f)(&self.lin.from_spectral(y)))
    }

    fn linear(&self, y: &[f64], inverse: bool) -> Vec<f64> {
        let (bs, bu) = if inverse {
            (self.lin.b_stable_inv(), self.lin.b_unstable_inv())
        } else {
            (self.lin.b_stable(), self.lin.b_unstable())
        };
        let mut out = block_apply(bs, y, &self.stable);
        out.extend(block_apply(bu, y, &self.unstable));
        out
    }

    fn forward(&self, y: &[f64]) -> Vec<f64> {
        let by = self.linear(y, false);
        let g = self.g(y);
        by.iter().zip(&g).map(|(a, b)| a + b).collect()
    }

    /// Damped Newton for `G(x) = z` from `x = B⁻¹z`.
    fn inverse(&self, z: &[f64]) -> Result<Vec<f64>> {
        let scale = 1.0 + euclidean_norm(z);
        let defect = |x: &[f64]| -> Vec<f64> { self.forward(x).iter().zip(z).map(|(a, b)| a - b).collect() };
        let mut x = self.linear(z, true);
        let mut r = defect(&x);
        let mut rn = euclidean_norm(&r);
        for _ in 0..NEWTON_MAX_ITER {
            if rn <= f64::EPSILON * scale {
                return Ok(x);
            }
            let fwd = |p: &[f64]| self.forward(p);
            let j = jacobian(&fwd, &x);
            let dx = j
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(&r))
                .ok_or_else(|| BlidError::Convergence("singular Jacobian in the inverse map".into()))?;
            let mut t = 1.0;
            let (next, next_r, next_rn) = loop {
                let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a - t * d).collect();
                let cr = defect(&cand);
                let cn = euclidean_norm(&cr);
                if cn < rn || t < 1e-6 {
                    break (cand, cr, cn);
                }
                t *= 0.5;
            };
            if next_rn >= rn {
                break;
            }
            (x, r, rn) = (next, next_r, next_rn);
        }
        if rn <= NEWTON_ACCEPT * scale {
            Ok(x)
        } else {
            Err(BlidError::Convergence(format!(
                "Newton iteration for the inverse map stalled at residual {rn:e} for target {z:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacySummary {
    pub dimension: usize,
    pub box_radius: f64,
    pub grid_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Sup of `‖Φ(F(x)) − ΛΦ(x)‖` at the grid points where the iteration
    /// enforces the equation.
    pub residual: f64,
    /// Sup-change of each sweep.
    pub residual_history: Vec<f64>,
    /// Same defect with the orbit-lifted `Φ`, on a grid twice as fine.
    pub validation_residual: f64,
    pub phi_at_zero: Vec<f64>,
}

/// Tabulated `Φ − id` with the data needed to evaluate `Φ` anywhere.
#[derive(Clone)]
pub struct ConjugacyResult {
    system: SpectralSystem,
    grid: BoxGrid,
    /// `w` at the nodes, `dim` entries per node.
    table: Vec<f64>,
    summary: ConjugacySummary,
}

impl std::fmt::Debug for ConjugacyResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConjugacyResult").field("summary", &self.summary).finish_non_exhaustive()
    }
}

/// Solves `Φ∘F = Λ∘Φ` for `F = Λ + f̃` by Jacobi sweeps of
///
/// * unstable block: `w_u ← B_u⁻¹ (w_u∘G + g_u)`,
/// * stable block: `w_s ← B_s (w_s∘G⁻¹) − g_s∘G⁻¹`,
///
/// until the sup-change of a sweep drops below `tol`. `iterations` counts the
/// sweeps that still changed the table by at least `tol`. Running out of
/// sweeps is reported through `converged = false`; failure to invert `G` at
/// a node is an error.
pub fn conjugacy_iterate(
    lambda: &HyperbolicLinear,
    f_tilde: VectorMap,
    box_radius: f64,
    grid_n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<ConjugacyResult> {
    let dim = lambda.dimension();
    if dim > MAX_DIMENSION {
        return Err(argument(format!("conjugacy tabulation supports n ≤ {MAX_DIMENSION}, got {dim}")));
    }
    if grid_n < 3 || grid_n.is_multiple_of(2) {
        return Err(argument(format!("grid_n must be odd and at least 3, got {grid_n}")));
    }
    if !(box_radius.is_finite() && box_radius > 0.0) {
        return Err(argument(format!("box_radius must be positive, got {box_radius}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(argument(format!("tol must be positive, got {tol}")));
    }
    let system = SpectralSystem::new(lambda, f_tilde);
    let grid = BoxGrid::new(dim, grid_n, box_radius);
    let nodes: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let g_at: Vec<Vec<f64>> = nodes.par_iter().map(|y| system.g(y)).collect();
    let fwd: Vec<Vec<f64>> = nodes.par_iter().map(|y| system.forward(y)).collect();
    let back: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|z| system.inverse(z))
        .collect::<Result<_>>()?;
    let g_back: Vec<Vec<f64>> = back.par_iter().map(|x| system.g(x)).collect();

    let (stable, unstable) = (&system.stable, &system.unstable);
    let (bs, bu_inv) = (lambda.b_stable(), lambda.b_unstable_inv());
    let sweep = |w: &[f64]| -> Vec<f64> {
        let mut next = vec![0.0; w.len()];
        next.par_chunks_mut(dim).enumerate().for_each(|(i, out)| {
            if !unstable.is_empty() {
                let shifted = grid.interpolate(w, unstable, &fwd[i]);
                let rhs: Vec<f64> = shifted
                    .iter()
                    .zip(unstable)
                    .map(|(v, &c)| v + g_at[i][c])
                    .collect();
                for (v, &c) in mat_vec(bu_inv, &rhs).into_iter().zip(unstable) {
                    out[c] = v;
                }
            }
            if !stable.is_empty() {
                let pulled = mat_vec(bs, &grid.interpolate(w, stable, &back[i]));
                for (v, &c) in pulled.into_iter().zip(stable) {
                    out[c] = v - g_back[i][c];
                }
            }
        });
        next
    };

    let mut table = vec![0.0; grid.len() * dim];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        let next = sweep(&table);
        let change = next
            .par_iter()
            .zip(&table)
            .map(|(a, b)| (a - b).abs())
            .reduce(|| 0.0, f64::max);
        table = next;
        history.push(change);
        if change < tol {
            converged = true;
            break;
        }
        iterations += 1;
    }

    // Defect where each block is enforced: at y for the unstable block, at
    // G⁻¹(y) for the stable block.
    let (bu, bs_mat) = (lambda.b_unstable(), lambda.b_stable());
    let residual = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut d = vec![0.0; dim];
            let own = &table[i * dim..(i + 1) * dim];
            if !unstable.is_empty() {
                let at_fwd = grid.interpolate(&table, unstable, &fwd[i]);
                let b_own = block_apply(bu, own, unstable);
                for (k, &c) in unstable.iter().enumerate() {
                    d[c] = g_at[i][c] + at_fwd[k] - b_own[k];
                }
            }
            if !stable.is_empty() {
                let at_back = mat_vec(bs_mat, &grid.interpolate(&table, stable, &back[i]));
                for (k, &c) in stable.iter().enumerate() {
                    d[c] = g_back[i][c] + own[c] - at_back[k];
                }
            }
            euclidean_norm(&lambda.from_spectral(&d))
        })
        .reduce(|| 0.0, f64::max);

    let center = (0..dim).fold(0, |acc, _| acc * grid_n + grid.center());
    let phi_at_zero = lambda.from_spectral(&table[center * dim..(center + 1) * dim]);
    let mut result = ConjugacyResult {
        system,
        grid,
        table,
        summary: ConjugacySummary {
            dimension: dim,
            box_radius,
            grid_n,
            tol,
            max_iter,
            iterations,
            converged,
            residual,
            residual_history: history,
            validation_residual: f64::NAN,
            phi_at_zero,
        },
    };
    result.summary.validation_residual = result.validation_residual()?;
    Ok(result)
}

impl ConjugacyResult {
    pub fn summary(&self) -> &ConjugacySummary {
        &self.summary
    }

    pub fn converged(&self) -> bool {
        self.summary.converged
    }

    pub fn iterations(&self) -> usize {
        self.summary.iterations
    }

    pub fn residual(&self) -> f64 {
        self.summary.residual
    }

    pub fn dimension(&self) -> usize {
        self.grid.dim
    }

    /// Grid nodes and `Φ − id` there, both in original coordinates.
    pub fn phi_table(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let lin = &self.system.lin;
        let d = self.grid.dim;
        (0..self.grid.len())
            .map(|i| {
                (
                    lin.from_spectral(&self.grid.node(i)),
                    lin.from_spectral(&self.table[i * d..(i + 1) * d]),
                )
            })
            .collect()
    }

    /// `w` off the grid, pushed along `LIFT_STEPS` steps of the orbit before
    /// reading the table:
    /// `w_u(y) = Σ_{n<L} B_u^{−(n+1)} g_u(Gⁿy) + B_u^{−L} w_u(G^L y)` and
    /// `w_s(z) = −Σ_{n=1..L} B_s^{n−1} g_s(G^{−n}z) + B_s^L w_s(G^{−L}z)`.
    /// Table errors are damped by `‖B_u^{−L}‖`, `‖B_s^L‖`.
    fn lifted(&self, y: &[f64]) -> Result<Vec<f64>> {
        let sys = &self.system;
        let lin = &sys.lin;
        let mut w = vec![0.0; self.grid.dim];
        if !sys.unstable.is_empty() {
            let nu = sys.unstable.len();
            let mut q = DMatrix::<f64>::identity(nu, nu);
            let mut acc = vec![0.0; nu];
            let mut p = y.to_vec();
            for _ in 0..LIFT_STEPS {
                q = &q * lin.b_unstable_inv();
                let g = select(&sys.g(&p), &sys.unstable);
                acc.iter_mut().zip(mat_vec(&q, &g)).for_each(|(a, v)| *a += v);
                p = sys.forward(&p);
            }
            let tail = mat_vec(&q, &self.grid.interpolate(&self.table, &sys.unstable, &p));
            for (k, &c) in sys.unstable.iter().enumerate() {
                w[c] = acc[k] + tail[k];
            }
        }
        if !sys.stable.is_empty() {
            let ns = sys.stable.len();
            let mut q = DMatrix::<f64>::identity(ns, ns);
            let mut acc = vec![0.0; ns];
            let mut p = y.to_vec();
            for _ in 0..LIFT_STEPS {
                p = sys.inverse(&p)?;
                let g = select(&sys.g(&p), &sys.stable);
                acc.iter_mut().zip(mat_vec(&q, &g)).for_each(|(a, v)| *a -= v);
                q = lin.b_stable() * &q;
            }
            let tail = mat_vec(&q, &self.grid.interpolate(&self.table, &sys.stable, &p));
            for (k, &c) in sys.stable.iter().enumerate() {
                w[c] = acc[k] + tail[k];
            }
        }
        Ok(w)
    }

    /// `Φ(x)` in original coordinates.
    pub fn phi(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.grid.dim {
            return Err(argument(format!("point of dimension {} for a map on ℝ^{}", x.len(), self.grid.dim)));
        }
        let lin = &self.system.lin;
        let u = lin.from_spectral(&self.lifted(&lin.to_spectral(x))?);
        Ok(x.iter().zip(&u).map(|(a, b)| a + b).collect())
    }

    /// Sup of `‖Φ(F(x)) − ΛΦ(x)‖` with the lifted `Φ` over the box grid with
    /// twice the resolution. The lifted `Φ` satisfies the equation up to the
    /// damped table error, so this mainly guards the orbit evaluation.
    fn validation_residual(&self) -> Result<f64> {
        let fine = BoxGrid::new(self.grid.dim, 2 * self.grid.per_axis - 1, self.grid.radius);
        let sys = &self.system;
        let lin = &sys.lin;
        let defects: Vec<f64> = (0..fine.len())
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let y = fine.node(i);
                let gy = sys.forward(&y);
                let w_gy = self.lifted(&gy)?;
                let w_y = self.lifted(&y)?;
                let b_w = sys.linear(&w_y, false);
                let g = sys.g(&y);
                let d: Vec<f64> = (0..y.len()).map(|c| g[c] + w_gy[c] - b_w[c]).collect();
                Ok(euclidean_norm(&lin.from_spectral(&d)))
            })
            .collect::<Result<_>>()?;
        Ok(defects.into_iter().fold(0.0, f64::max))
    }

    /// CSV with columns `x_1..x_n, phi_minus_id_1..phi_minus_id_n`.
    pub fn write_table_csv(&self, path: &Path) -> Result<()> {
        let d = self.grid.dim;
        let mut w = csv::Writer::from_path(path)?;
        let header: Vec<String> = (1..=d)
            .map(|i| format!("x_{i}"))
            .chain((1..=d).map(|i| format!("phi_minus_id_{i}")))
            .collect();
        w.write_record(&header)?;
        for (x, u) in self.phi_table() {
            w.write_record(x.iter().chain(&u).map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares fit of `log max_{‖x‖=r} ‖Φ(x) − x‖` against `log r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    /// Slope minus one; `None` when indeterminate.
    pub beta_hat: Option<f64>,
    /// Fewer than two radii above the noise floor: `Φ ≈ id` at this scale.
    pub indeterminate: bool,
    /// `β̂ > α`; the exponent cannot exceed `α`.
    pub clipped: bool,
    pub alpha: f64,
    /// Root-mean-square residual of the log-log fit.
    pub fit_residual: Option<f64>,
    /// Largest and smallest radius used.
    pub fit_window: (f64, f64),
    pub radii: Vec<f64>,
    pub max_deviation: Vec<f64>,
    pub noise_floor: f64,
}

/// Points on the sphere of radius `r` in ℝⁿ, `n ≤ 3`.
fn sphere_points(dim: usize, r: f64) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![r], vec![-r]],
        2 => (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 64.0;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
        _ => {
            let count = 128;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let s = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * s * t.cos(), r * s * t.sin(), r * z]
                })
                .collect()
        }
    }
}

/// Fits the exponent of `Φ(x) − x = O(‖x‖^{1+β})` over `radii`, which must
/// be strictly decreasing and positive.
pub fn fit_beta(result: &ConjugacyResult, radii: &[f64], alpha: f64) -> Result<BetaFit> {
    if radii.len() < 2 || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(argument("radii must be a strictly decreasing list of at least two positive values"));
    }
    let dim = result.dimension();
    let max_deviation: Vec<f64> = radii
        .par_iter()
        .map(|&r| -> Result<f64> {
            let mut m: f64 = 0.0;
            for x in sphere_points(dim, r) {
                let p = result.phi(&x)?;
                let d: Vec<f64> = p.iter().zip(&x).map(|(a, b)| a - b).collect();
                m = m.max(euclidean_norm(&d));
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = radii
        .iter()
        .zip(&max_deviation)
        .filter(|(_, d)| **d > BETA_NOISE_FLOOR)
        .map(|(r, d)| (r.ln(), d.ln()))
        .collect();
    let fit_window = (radii[0], radii[radii.len() - 1]);
    if points.len() < 2 {
        return Ok(BetaFit {
            beta_hat: None,
            indeterminate: true,
            clipped: false,
            alpha,
            fit_residual: None,
            fit_window,
            radii: radii.to_vec(),
            max_deviation,
            noise_floor: BETA_NOISE_FLOOR,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let beta = slope - 1.0;
    Ok(BetaFit {
        beta_hat: Some(beta),
        indeterminate: false,
        clipped: beta > alpha,
        alpha,
        fit_residual: Some(rms),
        fit_window,
        radii: radii.to_vec(),
        max_deviation,
        noise_floor: BETA_NOISE_FLOOR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_map() -> VectorMap {
        Arc::new(|x: &[f64]| vec![0.0; x.len()])
    }

    #[test]
    fn grid_interpolation_is_exact_on_affine_data() {
        let grid = BoxGrid::new(2, 5, 1.0);
        let mut table = vec![0.0; grid.len() * 2];
        for i in 0..grid.len() {
            let y = grid.node(i);
            table[2 * i] = 1.0 + 2.0 * y[0] - y[1];
            table[2 * i + 1] = y[0];
        }
        let v = grid.interpolate(&table, &[0, 1], &[0.3, -0.6]);
        assert!((v[0] - (1.0 + 0.6 + 0.6)).abs() < 1e-14);
        assert!((v[1] - 0.3).abs() < 1e-15);
        assert_eq!(grid.interpolate(&table, &[0, 1], &[1.5, 0.0]), vec![0.0, 0.0]);
        assert_eq!(grid.node(grid.center() * 5 + grid.center()), vec![0.0, 0.0]);
    }

    #[test]
    fn zero_perturbation_needs_no_iterations() {
        let lin = HyperbolicLinear::new(&[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let r = conjugacy_iterate(&lin, zero_map(), 0.5, 11, 1e-12, 10).unwrap();
        assert!(r.converged());
        assert_eq!(r.iterations(), 0);
        assert_eq!(r.residual(), 0.0);
        assert_eq!(r.summary().validation_residual, 0.0);
        assert_eq!(r.phi(&[0.2, -0.1]).unwrap(), vec![0.2, -0.1]);
        let fit = fit_beta(&r, &[0.1, 0.01], 1.0).unwrap();
        assert!(fit.indeterminate && fit.beta_hat.is_none());
    }

    #[test]
    fn argument_checks() {
        let lin = HyperbolicLinear::new(&[vec![2.0]]).unwrap();
        assert!(conjugacy_iterate(&lin, zero_map(), 0.5, 10, 1e-12, 10).is_err());
        assert!(conjugacy_iterate(&lin, zero_map(), -0.5, 11, 1e-12, 10).is_err());
        let r = conjugacy_iterate(&lin, zero_map(), 0.5, 11, 1e-12, 10).unwrap();
        assert!(fit_beta(&r, &[0.01, 0.1], 1.0).is_err());
    }

    #[test]
    fn newton_inverts_forward_map() {
        let lin = HyperbolicLinear::new(&[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let f: VectorMap = Arc::new(|x: &[f64]| vec![x[1] * x[1], x[0] * x[0]]);
        let sys = SpectralSystem::new(&lin, f);
        for z in [[0.1, 0.2], [-0.3, 0.05], [0.0, 0.0]] {
            let x = sys.inverse(&z).unwrap();
            let back = sys.forward(&x);
            assert!((back[0] - z[0]).abs() < 1e-14 && (back[1] - z[1]).abs() < 1e-14);
        }
    }
}
