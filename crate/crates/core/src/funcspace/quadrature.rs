//! Repeated integration from the base point 0.
//!
//! The `m`-fold nested integral `∫_0^t dt_1 ∫_0^{t_1} … g(s) ds` is evaluated
//! through the single Cauchy-kernel integral
//! `∫_0^t (t - s)^{m-1} / (m-1)! · g(s) ds` with the composite trapezoid rule
//! on the sample grid of `g`.

use super::GridFunction;
use crate::error::{argument, BlidError, Result};

/// `∫_0^t (t-s)^{m-1}/(m-1)! g(s) ds` by composite trapezoid on the nodes of
/// `g` between 0 and `t` (end points interpolated when they are not nodes).
pub fn iterated_integral(g: &GridFunction, m: usize, t: f64) -> Result<f64> {
    if m < 1 {
        return Err(argument("iterated integral order must be at least 1"));
    }
    check_integrable(g)?;
    if !g.contains(0.0) || !g.contains(t) {
        return Err(BlidError::Domain(format!(
            "integration from 0 to {t} leaves [{}, {}]",
            g.lo(),
            g.hi()
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }

    let kernel = |s: f64| cauchy_kernel(t - s, m);
    let h = g.spacing();
    let mut points = vec![0.0];
    // Interior nodes strictly between 0 and t, walking from 0 toward t.
    if t > 0.0 {
        let first = ((0.0 - g.lo()) / h).floor() as usize + 1;
        for i in first..=g.intervals() {
            let s = g.node(i);
            if s >= t {
                break;
            }
            if s > 0.0 {
                points.push(s);
            }
        }
    } else {
        let first = ((0.0 - g.lo()) / h).ceil() as i64 - 1;
        let mut i = first;
        while i >= 0 {
            let s = g.node(i as usize);
            if s <= t {
                break;
            }
            if s < 0.0 {
                points.push(s);
            }
            i -= 1;
        }
    }
    points.push(t);

    let values: Vec<f64> = points
        .iter()
        .map(|&s| kernel(s) * g.interpolate(s))
        .collect();
    let total = points
        .windows(2)
        .zip(values.windows(2))
        .map(|(s, v)| (s[1] - s[0]) * 0.5 * (v[0] + v[1]))
        .sum();
    Ok(total)
}

/// The same trapezoid sums as [`iterated_integral`] evaluated at every node
/// at once, in `O(n·m)`.
///
/// Expands `(t - s)^{m-1}` binomially, so the result is a combination of the
/// cumulative moments `∫_0^t s^i g(s) ds`. Requires 0 to be a node of `g`.
pub fn iterated_integral_on_grid(g: &GridFunction, m: usize) -> Result<GridFunction> {
    if m < 1 {
        return Err(argument("iterated integral order must be at least 1"));
    }
    check_integrable(g)?;
    let z = g
        .node_index(0.0)
        .ok_or_else(|| argument("0 must be a node of the integration grid"))?;
    let nodes: Vec<f64> = g.nodes().collect();
    let samples = g.samples();
    let len = samples.len();

    // moments[i][j] = ∫_0^{t_j} s^i g(s) ds (trapezoid).
    let mut moments = vec![vec![0.0; len]; m];
    for (i, row) in moments.iter_mut().enumerate() {
        let integrand: Vec<f64> = nodes
            .iter()
            .zip(samples)
            .map(|(&s, &v)| powi(s, i) * v)
            .collect();
        for j in z + 1..len {
            row[j] = row[j - 1] + (nodes[j] - nodes[j - 1]) * 0.5 * (integrand[j] + integrand[j - 1]);
        }
        for j in (0..z).rev() {
            row[j] = row[j + 1] - (nodes[j + 1] - nodes[j]) * 0.5 * (integrand[j] + integrand[j + 1]);
        }
    }

    let out = (0..len)
        .map(|j| {
            if j == z {
                return 0.0;
            }
            let t = nodes[j];
            (0..m)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    cauchy_kernel(t, m - i) * sign / factorial(i) * moments[i][j]
                })
                .sum()
        })
        .collect();
    Ok(g.with_samples(out))
}

/// `x^{m-1}/(m-1)!`.
pub(crate) fn cauchy_kernel(x: f64, m: usize) -> f64 {
    powi(x, m - 1) / factorial(m - 1)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub(crate) fn powi(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}

fn check_integrable(g: &GridFunction) -> Result<()> {
    if g.is_discrete() {
        return Err(argument("cannot integrate over a finite set"));
    }
    Ok(())
}
