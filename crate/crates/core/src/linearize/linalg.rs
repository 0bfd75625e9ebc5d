//! Small dense helpers for maps on `ℝⁿ`.

use nalgebra::DMatrix;

use crate::funcspace::euclidean_norm;

pub const POWER_ITERATIONS: usize = 20;
/// Relative step of the central-difference Jacobian.
pub const JACOBIAN_REL_STEP: f64 = 1e-5;
/// Smallest absolute Jacobian step.
pub const JACOBIAN_MIN_STEP: f64 = 1e-9;

/// Central-difference Jacobian with step `1e-5 · ‖x‖` (at least `1e-9`).
pub fn jacobian(f: &(dyn Fn(&[f64]) -> Vec<f64> + Sync), x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let step = (JACOBIAN_REL_STEP * euclidean_norm(x)).max(JACOBIAN_MIN_STEP);
    let mut cols = Vec::with_capacity(n);
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + step;
        let plus = f(&xp);
        xp[j] = x[j] - step;
        let minus = f(&xp);
        xp[j] = x[j];
        cols.push(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * step)).collect::<Vec<_>>());
    }
    let m = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(m, n, |i, j| cols[j][i])
}

/// Spectral norm by power iteration on `JᵀJ` from a fixed generic start.
pub fn operator_norm(j: &DMatrix<f64>) -> f64 {
    let n = j.ncols();
    if n == 0 || j.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let jtj = j.transpose() * j;
    let mut v = nalgebra::DVector::from_fn(n, |i, _| 1.0 / (i as f64 + 1.0).sqrt());
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = &jtj * &v;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        lambda = v.dot(&w);
        v = w / norm;
    }
    let rayleigh = v.dot(&(&jtj * &v));
    lambda.max(rayleigh).max(0.0).sqrt()
}
