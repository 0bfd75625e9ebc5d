use super::{GridFunction, JetGridFunction};

/// Linear structure shared by every element type the toolkit maps between.
///
/// Mixing elements of different layouts is a programming error and panics.
pub trait Vector: Clone + Send + Sync {
    /// `self + alpha · other`.
    fn add_scaled(&self, alpha: f64, other: &Self) -> Self;

    fn scaled(&self, alpha: f64) -> Self;

    fn zero_like(&self) -> Self {
        self.scaled(0.0)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add_scaled(-1.0, other)
    }
}

impl Vector for GridFunction {
    fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + alpha * b)
            .expect("grid functions on the same grid")
    }

    fn scaled(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }
}

impl Vector for JetGridFunction {
    fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        self.try_add_scaled(alpha, other)
            .expect("jet functions with the same layout")
    }

    fn scaled(&self, alpha: f64) -> Self {
        self.map_values(|v| alpha * v)
    }
}

impl Vector for Vec<f64> {
    fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vectors of different dimension");
        self.iter().zip(other).map(|(a, b)| a + alpha * b).collect()
    }

    fn scaled(&self, alpha: f64) -> Self {
        self.iter().map(|v| alpha * v).collect()
    }
}

pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
