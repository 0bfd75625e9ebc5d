//! Demo local maps addressable by name.
//!
//! Jet versions push the rule through the derivatives: `(x²)^{(n)}` by the
//! Leibniz rule, `(e^x)^{(n)}` by `y^{(n)} = Σ_{i<n} C(n-1, i) y^{(i)} x^{(n-i)}`.

use std::sync::Arc;

use crate::funcspace::{GridFunction, JetGridFunction};

type Catalog<X> = Arc<dyn Fn(&X) -> X + Send + Sync>;

/// Element types with a catalog of demo rules.
pub trait CatalogDomain: Sized {
    const NAMES: &'static [&'static str];

    fn catalog_rule(name: &str) -> Option<Catalog<Self>>;
}

pub fn catalog_names<X: CatalogDomain>() -> &'static [&'static str] {
    X::NAMES
}

fn scalar_rule(name: &str) -> Option<fn(f64) -> f64> {
    Some(match name {
        "identity" => |u| u,
        "square" => |u| u * u,
        "exp_minus_one" => f64::exp_m1,
        "abs" => f64::abs,
        _ => return None,
    })
}

impl CatalogDomain for GridFunction {
    const NAMES: &'static [&'static str] = &["identity", "square", "exp_minus_one", "abs", "integral_square"];

    fn catalog_rule(name: &str) -> Option<Catalog<Self>> {
        if name == "integral_square" {
            return Some(Arc::new(integral_square_grid));
        }
        let f = scalar_rule(name)?;
        Some(Arc::new(move |x: &GridFunction| x.map(f)))
    }
}

impl CatalogDomain for Vec<f64> {
    const NAMES: &'static [&'static str] = &["identity", "square", "exp_minus_one", "abs"];

    fn catalog_rule(name: &str) -> Option<Catalog<Self>> {
        let f = scalar_rule(name)?;
        Some(Arc::new(move |x: &Vec<f64>| x.iter().map(|&v| f(v)).collect()))
    }
}

impl CatalogDomain for JetGridFunction {
    const NAMES: &'static [&'static str] = &["identity", "square", "exp_minus_one", "abs", "integral_square"];

    fn catalog_rule(name: &str) -> Option<Catalog<Self>> {
        let chain: fn(&[f64]) -> Vec<f64> = match name {
            "identity" => return Some(Arc::new(|x: &JetGridFunction| x.clone())),
            "integral_square" => return Some(Arc::new(integral_square_jet)),
            "square" => square_derivatives,
            "exp_minus_one" => exp_minus_one_derivatives,
            "abs" => abs_derivatives,
            _ => return None,
        };
        Some(Arc::new(move |x: &JetGridFunction| map_jet(x, chain)))
    }
}

/// `(Kx)(t) = ∫_0^t x(s)² ds`, cumulative trapezoid from 0.
fn integral_square_grid(x: &GridFunction) -> GridFunction {
    let sq = x.map(|v| v * v);
    // Grids without a node at 0 integrate from their left end.
    cumulative(&sq, x.node_index(0.0).unwrap_or(0))
}

fn cumulative(g: &GridFunction, origin: usize) -> GridFunction {
    let s = g.samples();
    let h = g.spacing();
    let mut out = vec![0.0; s.len()];
    for j in origin + 1..s.len() {
        out[j] = out[j - 1] + 0.5 * h * (s[j] + s[j - 1]);
    }
    for j in (0..origin).rev() {
        out[j] = out[j + 1] - 0.5 * h * (s[j] + s[j + 1]);
    }
    g.with_samples(out)
}

/// `(Kx)' = x²`, so `(Kx)^{(j)} = (x²)^{(j-1)}` and `(Kx)(0) = 0`.
fn integral_square_jet(x: &JetGridFunction) -> JetGridFunction {
    let q = x.q();
    if q == 0 {
        let top = integral_square_grid(x.top());
        return JetGridFunction::new(0, vec![], top).expect("same layout");
    }
    let derivs = x.reconstruct_all();
    let z = x.top().node_index(0.0).expect("0 is a node");
    let at_zero: Vec<f64> = derivs.iter().map(|g| g.samples()[z]).collect();
    let sq0 = square_derivatives(&at_zero);
    let mut jet = vec![0.0];
    jet.extend_from_slice(&sq0[..q - 1]);
    let top = derivs[0].with_samples(
        (0..derivs[0].samples().len())
            .map(|i| {
                let at: Vec<f64> = derivs[..q].iter().map(|g| g.samples()[i]).collect();
                square_derivatives(&at)[q - 1]
            })
            .collect(),
    );
    JetGridFunction::new(q, jet, top).expect("same layout")
}

/// Applies a rule given as "derivatives of the image from derivatives of the
/// argument at one point".
fn map_jet(x: &JetGridFunction, chain: fn(&[f64]) -> Vec<f64>) -> JetGridFunction {
    let q = x.q();
    let derivs = x.reconstruct_all();
    let z = x.top().node_index(0.0).expect("0 is a node");
    let mut at_zero: Vec<f64> = x.jet().to_vec();
    at_zero.push(x.top().samples()[z]);
    let jet = chain(&at_zero)[..q].to_vec();
    let top = derivs[q].with_samples(
        (0..derivs[q].samples().len())
            .map(|i| {
                let at: Vec<f64> = derivs.iter().map(|g| g.samples()[i]).collect();
                chain(&at)[q]
            })
            .collect(),
    );
    JetGridFunction::new(q, jet, top).expect("same layout")
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(x²)^{(n)} = Σ_i C(n, i) x^{(i)} x^{(n-i)}` for `n = 0..len`.
fn square_derivatives(d: &[f64]) -> Vec<f64> {
    (0..d.len())
        .map(|n| (0..=n).map(|i| binomial(n, i) * d[i] * d[n - i]).sum())
        .collect()
}

fn exp_minus_one_derivatives(d: &[f64]) -> Vec<f64> {
    let mut y = vec![d[0].exp()];
    for n in 1..d.len() {
        let v = (0..n).map(|i| binomial(n - 1, i) * y[i] * d[n - i]).sum();
        y.push(v);
    }
    y[0] = d[0].exp_m1();
    y
}

/// `|x|^{(n)} = sign(x) x^{(n)}` away from zeros of `x`.
fn abs_derivatives(d: &[f64]) -> Vec<f64> {
    let s = if d[0] > 0.0 {
        1.0
    } else if d[0] < 0.0 {
        -1.0
    } else {
        0.0
    };
    let mut out: Vec<f64> = d.iter().map(|v| s * v).collect();
    out[0] = d[0].abs();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_jet(q: usize, jet: Vec<f64>, top: impl Fn(f64) -> f64) -> JetGridFunction {
        JetGridFunction::new(q, jet, GridFunction::from_fn(0.0, 1.0, 1024, top).unwrap()).unwrap()
    }

    #[test]
    fn jet_square_matches_sampled_square() {
        // x = 0.3 + 0.5 t + sin t (so x'' = -sin t), q = 2.
        let x = unit_jet(2, vec![0.3, 1.5], |t| -t.sin());
        let y = JetGridFunction::catalog_rule("square").unwrap()(&x);
        let direct = x.reconstruct(0).unwrap().map(|v| v * v);
        let got = y.reconstruct(0).unwrap();
        for (a, b) in got.samples().iter().zip(direct.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn jet_exp_matches_sampled_exp() {
        let x = unit_jet(3, vec![0.1, -0.4, 0.2], |t| (2.0 * t).cos());
        let y = JetGridFunction::catalog_rule("exp_minus_one").unwrap()(&x);
        let direct = x.reconstruct(0).unwrap().map(f64::exp_m1);
        for (a, b) in y.reconstruct(0).unwrap().samples().iter().zip(direct.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn jet_integral_square_matches_quadrature() {
        let x = unit_jet(1, vec![0.2], |t| t.cos());
        let y = JetGridFunction::catalog_rule("integral_square").unwrap()(&x);
        let x0 = x.reconstruct(0).unwrap();
        let direct = integral_square_grid(&x0);
        for (a, b) in y.reconstruct(0).unwrap().samples().iter().zip(direct.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn grid_integral_square_of_one() {
        let one = GridFunction::constant(0.0, 1.0, 100, 1.0).unwrap();
        let y = integral_square_grid(&one);
        for (t, v) in y.nodes().zip(y.samples()) {
            assert!((v - t).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_names() {
        assert!(GridFunction::catalog_rule("cube").is_none());
        assert!(<Vec<f64>>::catalog_rule("integral_square").is_none());
    }
}
