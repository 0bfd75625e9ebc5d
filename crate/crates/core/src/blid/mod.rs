//! Bounded local-identity maps: total maps that equal the identity on a ball
//! around 0 and have bounded image.

mod certify;
mod scale;

pub use certify::{certify_blid, CertificationReport};
pub use scale::{blid_metric_scale, blid_scale, metric_scale_index};

use serde::{Deserialize, Serialize};

use crate::bump::BumpFunction;
use crate::error::{argument, Result};
use crate::funcspace::{
    euclidean_norm, frechet_distance_to_zero, norm_q, norm_sup, norm_windowed, GridFunction,
    GridLayout, JetGridFunction, NormFamilyDescriptor, Vector,
};

/// Relative slack added to analytic suprema so that the certified bound is a
/// strict upper bound on every computed output norm.
const BOUND_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlidKind {
    /// `H(x)(t) = h(x(t))·x(t)` on continuous functions.
    PointwiseC0,
    /// The jet construction on `C^q[0,1]`.
    JetCq,
    /// `x ↦ s_out · H(s_in · x)` for one of the other kinds.
    Scaled,
    /// Member `H_k` of a family adapted to the `k`-th norm of a Fréchet space.
    WindowedFamilyMember,
    /// `H(x) = h(‖x‖)·x` on `ℝⁿ`.
    FiniteDim,
}

/// A total map `x ↦ scale_out · H_base(scale_in · x)` with its certified data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlidMap {
    base: BlidKind,
    bump: BumpFunction,
    /// Input order for `JetCq`; output order for windowed members.
    q: usize,
    k: usize,
    dim: usize,
    family: Option<NormFamilyDescriptor>,
    scale_in: f64,
    scale_out: f64,
    /// Certified sup of the output norm; `None` until certified.
    bound_n: Option<f64>,
    analytic_bound: f64,
    identity_radius: f64,
    empirical_bound: Option<f64>,
    /// Radius of the metric ball containing the image, for metric-scaled maps.
    metric_bound: Option<f64>,
}

impl BlidMap {
    fn unscaled(base: BlidKind, bump: BumpFunction, analytic_bound: f64) -> Self {
        Self {
            base,
            bump,
            q: 0,
            k: 0,
            dim: 0,
            family: None,
            scale_in: 1.0,
            scale_out: 1.0,
            bound_n: Some(analytic_bound * (1.0 + BOUND_MARGIN)),
            analytic_bound,
            identity_radius: bump.r_in(),
            empirical_bound: None,
            metric_bound: None,
        }
    }

    /// `H(x)(t) = h(x(t))·x(t)`; image in the sup-norm ball of radius `a`.
    pub fn pointwise_c0(bump: BumpFunction) -> Self {
        Self::unscaled(BlidKind::PointwiseC0, bump, bump.linear_bound())
    }

    /// The jet construction on `C^q[0,1]`:
    /// `H(x)(t) = Σ_{j<q} t^j/j! φ(x^{(j)}(0)) + I_q(φ(x^{(q)}))(t)`, `φ(u) = h(u)u`.
    /// Every derivative of the image is bounded by `a·Σ 1/m! < a·e`.
    pub fn jet_cq(bump: BumpFunction, q: usize) -> Result<Self> {
        if q < 1 {
            return Err(argument("jet construction needs q ≥ 1; use pointwise_c0 for q = 0"));
        }
        let mut h = Self::unscaled(BlidKind::JetCq, bump, bump.linear_bound() * std::f64::consts::E);
        h.q = q;
        Ok(h)
    }

    /// `H(x) = h(‖x‖)·x` on `ℝⁿ` with the Euclidean norm.
    pub fn finite_dim(bump: BumpFunction, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(argument("dimension must be at least 1"));
        }
        let mut h = Self::unscaled(BlidKind::FiniteDim, bump, bump.linear_bound());
        h.dim = n;
        Ok(h)
    }

    /// Member `k` of the family for `d`, acting on derivatives up to
    /// `p = d.order_for(k, ∞)` and bounded by `a·e^k` in `‖·‖_k`.
    fn windowed_member(bump: BumpFunction, d: NormFamilyDescriptor, k: usize) -> Self {
        let mut h = Self::unscaled(
            BlidKind::WindowedFamilyMember,
            bump,
            bump.linear_bound() * (k as f64).exp(),
        );
        h.q = d.order_for(k, usize::MAX);
        h.k = k;
        h.family = Some(d);
        h
    }

    pub fn kind(&self) -> BlidKind {
        if self.is_scaled() {
            BlidKind::Scaled
        } else {
            self.base
        }
    }

    /// The construction underneath any scaling.
    pub fn base_kind(&self) -> BlidKind {
        self.base
    }

    pub fn is_scaled(&self) -> bool {
        self.scale_in != 1.0 || self.scale_out != 1.0
    }

    pub fn bump(&self) -> &BumpFunction {
        &self.bump
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> Option<&NormFamilyDescriptor> {
        self.family.as_ref()
    }

    pub fn scale_in(&self) -> f64 {
        self.scale_in
    }

    pub fn scale_out(&self) -> f64 {
        self.scale_out
    }

    pub fn bound_n(&self) -> Option<f64> {
        self.bound_n
    }

    pub fn analytic_bound(&self) -> f64 {
        self.analytic_bound
    }

    pub fn identity_radius(&self) -> f64 {
        self.identity_radius
    }

    pub fn empirical_bound(&self) -> Option<f64> {
        self.empirical_bound
    }

    pub fn metric_bound(&self) -> Option<f64> {
        self.metric_bound
    }

    /// The bound certification compares against: the metric radius for
    /// metric-scaled maps, otherwise `bound_n`.
    pub fn claimed_bound(&self) -> Option<f64> {
        self.metric_bound.or(self.bound_n)
    }

    /// Drops the certified bound, as for a map whose image bound is unknown.
    pub fn without_bound(mut self) -> Self {
        self.bound_n = None;
        self
    }

    pub(crate) fn set_empirical_bound(&mut self, value: f64) {
        self.empirical_bound = Some(value);
    }

    /// Scalar rule `u ↦ s_out · φ(s_in · u)`, returning `u` itself on the
    /// identity branch so that small inputs pass through bit for bit.
    pub fn scalar(&self, u: f64) -> f64 {
        let v = self.scale_in * u;
        if v.abs() <= self.bump.r_in() {
            u
        } else {
            self.scale_out * self.bump.eval(v) * v
        }
    }

    fn expect_base(&self, kinds: &[BlidKind], what: &str) -> Result<()> {
        if kinds.contains(&self.base) {
            Ok(())
        } else {
            Err(argument(format!("{:?} map cannot act on {what}", self.base)))
        }
    }

    /// Pointwise construction on grid functions.
    pub fn apply_c0(&self, x: &GridFunction) -> Result<GridFunction> {
        self.expect_base(&[BlidKind::PointwiseC0], "grid functions")?;
        Ok(x.map(|u| self.scalar(u)))
    }

    /// Jet construction or windowed family member on `C^q` elements.
    pub fn apply_jet(&self, x: &JetGridFunction) -> Result<JetGridFunction> {
        self.expect_base(&[BlidKind::JetCq, BlidKind::WindowedFamilyMember], "jet functions")?;
        match self.base {
            BlidKind::JetCq => {
                if x.q() != self.q {
                    return Err(argument(format!(
                        "map of order {} applied to an element of order {}",
                        self.q,
                        x.q()
                    )));
                }
                Ok(x.map_values(|u| self.scalar(u)))
            }
            _ => {
                let p = self.q;
                if x.q() < p {
                    return Err(argument(format!(
                        "family member {} needs derivatives up to order {p}, element has order {}",
                        self.k,
                        x.q()
                    )));
                }
                let lowered = if x.q() == p { x.clone() } else { x.lower_order(p)? };
                Ok(lowered.map_values(|u| self.scalar(u)))
            }
        }
    }

    /// Finite-dimensional construction.
    pub fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.expect_base(&[BlidKind::FiniteDim], "vectors")?;
        if x.len() != self.dim {
            return Err(argument(format!(
                "map on ℝ^{} applied to a vector of length {}",
                self.dim,
                x.len()
            )));
        }
        let r = self.scale_in * euclidean_norm(x);
        if r <= self.bump.r_in() {
            return Ok(x.to_vec());
        }
        let factor = self.scale_out * self.bump.eval(r) * self.scale_in;
        Ok(x.iter().map(|v| factor * v).collect())
    }

    /// Output norm in which `bound_n` is stated, or the metric distance to 0
    /// for metric-scaled maps.
    pub fn output_norm_jet(&self, y: &JetGridFunction) -> f64 {
        match (self.base, self.family) {
            (BlidKind::WindowedFamilyMember, Some(d)) => {
                if self.metric_bound.is_some() {
                    frechet_distance_to_zero(y, &d)
                } else {
                    norm_windowed(y, self.k, &d)
                }
            }
            _ => norm_q(y),
        }
    }

    /// `max(|jet_j|, sup|x^{(p)}|)` at the order the map reads.
    pub fn governing_norm_jet(&self, x: &JetGridFunction) -> f64 {
        let p = self.q.min(x.q());
        if p == x.q() {
            x.governing_norm()
        } else {
            x.lower_order(p).map(|l| l.governing_norm()).unwrap_or(f64::INFINITY)
        }
    }

    /// Grid layout certification samples live on.
    pub fn sample_layout(&self) -> GridLayout {
        self.family.map(|d| d.layout()).unwrap_or_else(GridLayout::unit_interval)
    }
}

/// `H_0, …, H_{k_max}` for a Fréchet space. Member `k` reads derivatives up
/// to `min(k, q_cap)` (all `q_cap` of them on `C^q(ℝ)`) and carries the
/// analytic bound `a·e^k`, checked on a small stratified sample.
pub fn blid_windowed_family(d: &NormFamilyDescriptor, bump: BumpFunction) -> Result<Vec<BlidMap>> {
    if !d.kind.is_family() {
        return Err(argument(format!("{:?} is not a norm family", d.kind)));
    }
    (0..=d.k_max)
        .map(|k| {
            let mut member = BlidMap::windowed_member(bump, *d, k);
            let report = certify_blid(&member, FAMILY_CERTIFICATION_SAMPLES, FAMILY_SEED + k as u64)?;
            member.set_empirical_bound(report.empirical_bound);
            Ok(member)
        })
        .collect()
}

const FAMILY_CERTIFICATION_SAMPLES: usize = 18;
const FAMILY_SEED: u64 = 0x5eed;

/// The finite-dimensional construction `H(x) = h(‖x‖)·x` on `ℝⁿ`.
pub fn bump_to_blid(bump: BumpFunction, n: usize) -> Result<BlidMap> {
    BlidMap::finite_dim(bump, n)
}

/// Free-function form of [`BlidMap::apply_c0`].
pub fn blid_c0_apply(h: &BlidMap, x: &GridFunction) -> Result<GridFunction> {
    h.apply_c0(x)
}

pub fn blid_cq_apply(h: &BlidMap, x: &JetGridFunction) -> Result<JetGridFunction> {
    h.apply_jet(x)
}

/// Element types a blid map can act on.
pub trait BlidDomain: Vector {
    fn blid_apply(&self, h: &BlidMap) -> Result<Self>;

    /// The norm that decides whether `h` acts as the identity on `self`.
    fn governing_norm(&self, h: &BlidMap) -> f64;

    /// Norm of an image of `h`, in the sense of `h`'s claimed bound.
    fn output_norm(&self, h: &BlidMap) -> f64;

    /// Largest difference between `self` and an image, on represented data.
    fn identity_deviation(&self, image: &Self) -> f64;
}

impl BlidDomain for GridFunction {
    fn blid_apply(&self, h: &BlidMap) -> Result<Self> {
        h.apply_c0(self)
    }

    fn governing_norm(&self, _h: &BlidMap) -> f64 {
        norm_sup(self)
    }

    fn output_norm(&self, _h: &BlidMap) -> f64 {
        norm_sup(self)
    }

    fn identity_deviation(&self, image: &Self) -> f64 {
        self.zip_with(image, |a, b| (a - b).abs())
            .map(|d| norm_sup(&d))
            .unwrap_or(f64::INFINITY)
    }
}

impl BlidDomain for JetGridFunction {
    fn blid_apply(&self, h: &BlidMap) -> Result<Self> {
        h.apply_jet(self)
    }

    fn governing_norm(&self, h: &BlidMap) -> f64 {
        h.governing_norm_jet(self)
    }

    fn output_norm(&self, h: &BlidMap) -> f64 {
        h.output_norm_jet(self)
    }

    fn identity_deviation(&self, image: &Self) -> f64 {
        self.represented_deviation(image).unwrap_or(f64::INFINITY)
    }
}

impl BlidDomain for Vec<f64> {
    fn blid_apply(&self, h: &BlidMap) -> Result<Self> {
        h.apply_vec(self)
    }

    fn governing_norm(&self, _h: &BlidMap) -> f64 {
        euclidean_norm(self)
    }

    fn output_norm(&self, _h: &BlidMap) -> f64 {
        euclidean_norm(self)
    }

    fn identity_deviation(&self, image: &Self) -> f64 {
        if self.len() != image.len() {
            return f64::INFINITY;
        }
        self.iter()
            .zip(image)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{iterated_integral, NormKind};

    fn unit(f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(0.0, 1.0, 256, f).unwrap()
    }

    #[test]
    fn c0_examples() {
        let h = BlidMap::pointwise_c0(BumpFunction::default());
        let half = unit(|_| 0.5);
        assert_eq!(h.apply_c0(&half).unwrap(), half);
        let ten = unit(|_| 10.0);
        assert!(h.apply_c0(&ten).unwrap().samples().iter().all(|&v| v == 0.0));
        let x = unit(|t| 3.0 * (std::f64::consts::TAU * t).sin());
        let y = h.apply_c0(&x).unwrap();
        let b = BumpFunction::default();
        for (u, v) in x.samples().iter().zip(y.samples()) {
            assert_eq!(*v, if u.abs() <= 1.0 { *u } else { b.eval(*u) * u });
        }
    }

    #[test]
    fn c0_rejects_other_kinds() {
        let h = BlidMap::jet_cq(BumpFunction::default(), 1).unwrap();
        assert!(h.apply_c0(&unit(|_| 0.0)).is_err());
    }

    #[test]
    fn cq_examples() {
        let b = BumpFunction::default();
        let h1 = BlidMap::jet_cq(b, 1).unwrap();
        let id = JetGridFunction::new(1, vec![0.0], unit(|_| 1.0)).unwrap();
        assert_eq!(h1.apply_jet(&id).unwrap(), id);
        let steep = JetGridFunction::new(1, vec![0.0], unit(|_| 10.0)).unwrap();
        let out = h1.apply_jet(&steep).unwrap();
        assert_eq!(out.jet(), &[0.0]);
        assert!(out.top().samples().iter().all(|&v| v == 0.0));

        let h2 = BlidMap::jet_cq(b, 2).unwrap();
        let x = JetGridFunction::new(2, vec![0.5, 1.5], unit(|_| 3.0)).unwrap();
        let y = h2.apply_jet(&x).unwrap();
        // h(1.5) = 1/2, h(3) = 0: H(x)(t) = 0.5 + 0.75 t.
        assert_eq!(y.jet(), &[0.5, 0.75]);
        let r = y.reconstruct(0).unwrap();
        for (t, v) in r.nodes().zip(r.samples()) {
            assert!((v - (0.5 + 0.75 * t)).abs() < 1e-14);
        }
        assert!(h2.apply_jet(&id).is_err());
    }

    #[test]
    fn cq_matches_displayed_formula() {
        let b = BumpFunction::default();
        let h = BlidMap::jet_cq(b, 3).unwrap();
        let x = JetGridFunction::new(3, vec![0.4, -1.3, 2.2], unit(|t| 2.5 * (4.0 * t).cos())).unwrap();
        let y = h.apply_jet(&x).unwrap().reconstruct(0).unwrap();
        let phi = |u: f64| b.eval(u) * u;
        let integrand = x.top().map(phi);
        for (i, t) in y.nodes().enumerate().step_by(17) {
            let direct = phi(0.4) + t * phi(-1.3) + t * t / 2.0 * phi(2.2)
                + iterated_integral(&integrand, 3, t).unwrap();
            assert!((y.samples()[i] - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn finite_dim_examples() {
        let b = BumpFunction::default();
        let h = bump_to_blid(b, 2).unwrap();
        assert_eq!(h.apply_vec(&[0.1, 0.2]).unwrap(), vec![0.1, 0.2]);
        assert_eq!(h.apply_vec(&[100.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let x = [0.9, 1.2];
        let y = h.apply_vec(&x).unwrap();
        for i in 0..2 {
            assert!((y[i] - b.eval(1.5) * x[i]).abs() < 1e-15);
        }
        assert!(h.apply_vec(&[1.0]).is_err());
    }

    #[test]
    fn zero_maps_to_zero_everywhere() {
        let b = BumpFunction::default();
        let d = NormFamilyDescriptor::new(NormKind::WindowedRealLine, 3, 4).unwrap();
        let family = blid_windowed_family(&d, b).unwrap();
        let z = JetGridFunction::zero(3, -4.0, 4.0, 208).unwrap();
        for h in &family {
            let y = h.apply_jet(&z).unwrap();
            assert_eq!(y.governing_norm(), 0.0);
        }
        assert_eq!(BlidMap::pointwise_c0(b).apply_c0(&unit(|_| 0.0)).unwrap(), unit(|_| 0.0));
    }

    #[test]
    fn windowed_member_orders_and_identity() {
        let b = BumpFunction::default();
        let d = NormFamilyDescriptor::with_defaults(NormKind::CInfInterval);
        let family = blid_windowed_family(&d, b).unwrap();
        assert_eq!(family.len(), 21);
        assert_eq!(family[0].q(), 0);
        assert_eq!(family[3].q(), 3);
        assert_eq!(family[15].q(), 6);
        let x = JetGridFunction::new(0, vec![], unit(|_| 0.5)).unwrap();
        let y = family[0].apply_jet(&x).unwrap();
        assert_eq!(y, x);
        assert!(family[2].apply_jet(&x).is_err());
        for h in &family {
            let e = h.empirical_bound().unwrap();
            assert!(e < h.analytic_bound(), "k={} empirical {e}", h.k());
        }
    }

    #[test]
    fn member_lowers_higher_order_inputs() {
        let b = BumpFunction::default();
        let d = NormFamilyDescriptor::with_defaults(NormKind::CInfInterval);
        let h = BlidMap::windowed_member(b, d, 1);
        let x = JetGridFunction::new(3, vec![0.1, 0.2, 0.3], unit(|t| 0.4 * t)).unwrap();
        let y = h.apply_jet(&x).unwrap();
        assert_eq!(y.q(), 1);
        assert_eq!(x.represented_deviation(&y).unwrap(), 0.0);
    }

    #[test]
    fn idempotent_in_identity_region() {
        let h = BlidMap::pointwise_c0(BumpFunction::default());
        let x = unit(|t| 0.9 * (7.0 * t).sin());
        let once = h.apply_c0(&x).unwrap();
        assert_eq!(once, x);
        assert_eq!(h.apply_c0(&once).unwrap(), x);
    }
}
