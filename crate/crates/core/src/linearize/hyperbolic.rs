use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{argument, Result};

/// Eigenvalues closer than this (relative) to the unit circle are rejected.
const MIN_GAP: f64 = 1e-9;

/// A hyperbolic matrix `Λ` with its stable/unstable splitting.
///
/// Spectral coordinates `y = V⁻¹ x` put the stable block first:
/// `V⁻¹ Λ V = diag(B_s, B_u)`.
#[derive(Debug, Clone)]
pub struct HyperbolicLinear {
    matrix: DMatrix<f64>,
    moduli: Vec<f64>,
    gap: f64,
    basis: DMatrix<f64>,
    basis_inv: DMatrix<f64>,
    n_stable: usize,
    b_stable: DMatrix<f64>,
    b_unstable: DMatrix<f64>,
    b_stable_inv: DMatrix<f64>,
    b_unstable_inv: DMatrix<f64>,
}

impl HyperbolicLinear {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(argument("matrix must be square and non-empty"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(argument("matrix entries must be finite"));
        }
        let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let eig = a.clone().complex_eigenvalues();
        let moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
        let gap = moduli.iter().map(|m| (m - 1.0).abs()).fold(f64::INFINITY, f64::min);
        if gap <= MIN_GAP {
            return Err(argument(format!(
                "matrix is not hyperbolic: eigenvalue moduli {moduli:?}"
            )));
        }

        let mut stable = Vec::new();
        let mut unstable = Vec::new();
        for z in eig.iter() {
            if z.norm() < 1.0 {
                stable.push(*z);
            } else {
                unstable.push(*z);
            }
        }
        let v_s = invariant_subspace(&a, &stable)?;
        let v_u = invariant_subspace(&a, &unstable)?;
        let n_stable = v_s.ncols();
        let mut basis = DMatrix::zeros(n, n);
        basis.columns_mut(0, n_stable).copy_from(&v_s);
        basis.columns_mut(n_stable, n - n_stable).copy_from(&v_u);
        let basis_inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| argument("stable and unstable subspaces are not complementary"))?;
        let block = &basis_inv * &a * &basis;
        let n_u = n - n_stable;
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if (i < n_stable) != (j < n_stable) {
                    off = off.max(block[(i, j)].abs());
                }
            }
        }
        if off > 1e-8 * a.amax().max(1.0) {
            return Err(argument(format!("spectral split failed to block-diagonalize (off-block {off:e})")));
        }
        let b_stable = block.view((0, 0), (n_stable, n_stable)).into_owned();
        let b_unstable = block.view((n_stable, n_stable), (n_u, n_u)).into_owned();
        let invert = |m: &DMatrix<f64>| {
            if m.is_empty() {
                return Ok(m.clone());
            }
            m.clone().try_inverse().ok_or_else(|| argument("singular block"))
        };
        Ok(Self {
            b_stable_inv: invert(&b_stable)?,
            b_unstable_inv: invert(&b_unstable)?,
            matrix: a,
            moduli,
            gap,
            basis,
            basis_inv,
            n_stable,
            b_stable,
            b_unstable,
        })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `min | |λ| - 1 |` over the spectrum.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn n_stable(&self) -> usize {
        self.n_stable
    }

    /// Spectral-coordinate indices of the stable block.
    pub fn stable_indices(&self) -> Vec<usize> {
        (0..self.n_stable).collect()
    }

    pub fn unstable_indices(&self) -> Vec<usize> {
        (self.n_stable..self.dimension()).collect()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_inv(&self) -> &DMatrix<f64> {
        &self.basis_inv
    }

    pub fn b_stable(&self) -> &DMatrix<f64> {
        &self.b_stable
    }

    pub fn b_unstable(&self) -> &DMatrix<f64> {
        &self.b_unstable
    }

    pub fn b_stable_inv(&self) -> &DMatrix<f64> {
        &self.b_stable_inv
    }

    pub fn b_unstable_inv(&self) -> &DMatrix<f64> {
        &self.b_unstable_inv
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, x)
    }

    pub fn to_spectral(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.basis_inv, x)
    }

    pub fn from_spectral(&self, y: &[f64]) -> Vec<f64> {
        mat_vec(&self.basis, y)
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

/// Kernel of `Π (Λ - λ)` over `cluster` (conjugate pairs as real quadratics),
/// i.e. the sum of the generalized eigenspaces; columns normalized with their
/// largest entry positive.
fn invariant_subspace(a: &DMatrix<f64>, cluster: &[nalgebra::Complex<f64>]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let dim = cluster.len();
    if dim == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let scale = a.amax().max(1.0);
    let mut p = DMatrix::<f64>::identity(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    for z in cluster {
        if z.im.abs() <= 1e-12 * scale {
            p = &p * (a - &id * z.re);
        } else if z.im > 0.0 {
            p = &p * (a * a - a * (2.0 * z.re) + &id * z.norm_sqr());
        }
    }
    let svd = p.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| argument("singular value decomposition failed"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut out = DMatrix::zeros(n, dim);
    for (c, &i) in order.iter().take(dim).enumerate() {
        let mut col: Vec<f64> = (0..n).map(|k| v_t[(i, k)]).collect();
        let pivot = col.iter().copied().fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m });
        if pivot < 0.0 {
            col.iter_mut().for_each(|v| *v = -*v);
        }
        for (k, v) in col.into_iter().enumerate() {
            out[(k, c)] = v;
        }
    }
    Ok(out)
}

impl Serialize for HyperbolicLinear {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View {
            dimension: usize,
            matrix: Vec<Vec<f64>>,
            eigenvalue_moduli: Vec<f64>,
            gap: f64,
            stable_indices: Vec<usize>,
            unstable_indices: Vec<usize>,
            basis: Vec<Vec<f64>>,
        }
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
        };
        View {
            dimension: self.dimension(),
            matrix: rows(&self.matrix),
            eigenvalue_moduli: self.moduli.clone(),
            gap: self.gap,
            stable_indices: self.stable_indices(),
            unstable_indices: self.unstable_indices(),
            basis: rows(&self.basis),
        }
        .serialize(s)
    }
}
