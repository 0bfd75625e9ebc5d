//! Local maps defined on a ball around 0 and their global extensions
//! `F(x) = f(H(x))` through a blid map whose image stays inside the ball.

mod catalog;

pub use catalog::{catalog_names, CatalogDomain};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::blid::{blid_metric_scale, blid_scale, blid_windowed_family, BlidDomain, BlidMap};
use crate::bump::BumpFunction;
use crate::error::{argument, BlidError, Result};
use crate::funcspace::{
    euclidean_norm, frechet_distance_to_zero, norm_q, norm_sup, GridFunction, JetGridFunction,
    NormFamilyDescriptor, NormKind,
};

pub const DEFAULT_MARGIN: f64 = 0.5;

/// The space a local map is defined on, with the norm (or metric) whose ball
/// is its domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SourceSpace {
    /// `C(T)`, `C^q[0,1]` (order `q_cap`) or a Fréchet family.
    Function(NormFamilyDescriptor),
    Euclidean { dim: usize },
}

impl SourceSpace {
    pub fn function(kind: NormKind) -> Self {
        SourceSpace::Function(NormFamilyDescriptor::with_defaults(kind))
    }
}

/// Elements whose size can be measured in a [`SourceSpace`].
pub trait GermDomain: BlidDomain {
    fn space_norm(&self, space: &SourceSpace) -> Result<f64>;
}

fn mismatch(space: &SourceSpace, what: &str) -> BlidError {
    argument(format!("{what} do not belong to {space:?}"))
}

impl GermDomain for GridFunction {
    fn space_norm(&self, space: &SourceSpace) -> Result<f64> {
        match space {
            SourceSpace::Function(d) if d.kind == NormKind::SupOnT => Ok(norm_sup(self)),
            _ => Err(mismatch(space, "grid functions")),
        }
    }
}

impl GermDomain for JetGridFunction {
    fn space_norm(&self, space: &SourceSpace) -> Result<f64> {
        match space {
            SourceSpace::Function(d) if d.kind == NormKind::CqInterval => Ok(norm_q(self)),
            SourceSpace::Function(d) if d.kind.is_family() => Ok(frechet_distance_to_zero(self, d)),
            _ => Err(mismatch(space, "jet functions")),
        }
    }
}

impl GermDomain for Vec<f64> {
    fn space_norm(&self, space: &SourceSpace) -> Result<f64> {
        match space {
            SourceSpace::Euclidean { dim } if *dim == self.len() => Ok(euclidean_norm(self)),
            _ => Err(mismatch(space, "vectors")),
        }
    }
}

pub type Rule<X, Y> = Arc<dyn Fn(&X) -> Y + Send + Sync>;

/// A map defined on the open ball `{‖x‖ < domain_radius}` (metric ball for
/// Fréchet spaces). The rule must be pure; applying it outside the ball is a
/// [`BlidError::DomainFault`].
#[derive(Clone)]
pub struct LocalMap<X, Y = X> {
    name: String,
    domain_radius: f64,
    space: SourceSpace,
    rule: Rule<X, Y>,
}

impl<X, Y> fmt::Debug for LocalMap<X, Y> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalMap")
            .field("name", &self.name)
            .field("domain_radius", &self.domain_radius)
            .field("space", &self.space)
            .finish_non_exhaustive()
    }
}

impl<X: GermDomain, Y> LocalMap<X, Y> {
    pub fn new(
        name: impl Into<String>,
        space: SourceSpace,
        domain_radius: f64,
        rule: impl Fn(&X) -> Y + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::with_rule(name.into(), space, domain_radius, Arc::new(rule))
    }

    fn with_rule(name: String, space: SourceSpace, domain_radius: f64, rule: Rule<X, Y>) -> Result<Self> {
        if !(domain_radius.is_finite() && domain_radius > 0.0) {
            return Err(argument(format!("domain radius must be positive, got {domain_radius}")));
        }
        Ok(Self {
            name,
            domain_radius,
            space,
            rule,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn space(&self) -> &SourceSpace {
        &self.space
    }

    /// The rule, guarded by the domain check.
    pub fn apply(&self, x: &X) -> Result<Y> {
        let norm = x.space_norm(&self.space)?;
        if norm.is_nan() || norm >= self.domain_radius {
            return Err(BlidError::DomainFault {
                norm,
                radius: self.domain_radius,
            });
        }
        Ok((self.rule)(x))
    }

    /// The rule without the guard, for reference evaluations.
    pub fn apply_unchecked(&self, x: &X) -> Y {
        (self.rule)(x)
    }
}

impl<X: GermDomain + CatalogDomain> LocalMap<X, X> {
    /// A catalog rule by name; see [`catalog_names`].
    pub fn from_catalog(name: &str, space: SourceSpace, domain_radius: f64) -> Result<Self> {
        let rule = X::catalog_rule(name).ok_or_else(|| {
            BlidError::Configuration(format!(
                "unknown local map {name:?}; expected one of {:?}",
                catalog_names::<X>()
            ))
        })?;
        Self::with_rule(name.to_string(), space, domain_radius, rule)
    }
}

/// `F(x) = f(H(x))` with `H(X)` inside the domain of `f`.
#[derive(Debug, Clone)]
pub struct GlobalMap<X, Y = X> {
    inner: BlidMap,
    outer: LocalMap<X, Y>,
}

impl<X: GermDomain, Y> GlobalMap<X, Y> {
    pub fn new(inner: BlidMap, outer: LocalMap<X, Y>) -> Result<Self> {
        match inner.claimed_bound() {
            Some(b) if b < outer.domain_radius => Ok(Self { inner, outer }),
            other => Err(argument(format!(
                "blid image bound {other:?} does not fit inside the domain radius {}",
                outer.domain_radius
            ))),
        }
    }

    pub fn inner(&self) -> &BlidMap {
        &self.inner
    }

    pub fn outer(&self) -> &LocalMap<X, Y> {
        &self.outer
    }

    /// Radius on which `F` coincides with `f`, in the governing norm of `H`.
    pub fn identity_radius(&self) -> f64 {
        self.inner.identity_radius()
    }

    pub fn apply(&self, x: &X) -> Result<Y> {
        self.outer.apply(&x.blid_apply(&self.inner)?)
    }
}

/// Builds the blid map that sends `space` into the ball of radius `c`.
pub fn blid_into_ball(space: &SourceSpace, bump: BumpFunction, c: f64) -> Result<BlidMap> {
    match space {
        SourceSpace::Euclidean { dim } => blid_scale(&BlidMap::finite_dim(bump, *dim)?, c),
        SourceSpace::Function(d) => match d.kind {
            NormKind::SupOnT => blid_scale(&BlidMap::pointwise_c0(bump), c),
            NormKind::CqInterval => blid_scale(&BlidMap::jet_cq(bump, d.q_cap)?, c),
            _ => blid_metric_scale(&blid_windowed_family(d, bump)?, c, d),
        },
    }
}

/// Global representative of the germ of `f` at 0: `c = margin · radius`,
/// `F = f ∘ H_c`.
pub fn extend<X: GermDomain, Y>(f: LocalMap<X, Y>, bump: BumpFunction, margin: f64) -> Result<GlobalMap<X, Y>> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(argument(format!("margin must lie in (0, 1), got {margin}")));
    }
    let inner = blid_into_ball(&f.space, bump, margin * f.domain_radius)?;
    GlobalMap::new(inner, f)
}

pub fn apply_global<X: GermDomain, Y>(global: &GlobalMap<X, Y>, x: &X) -> Result<Y> {
    global.apply(x)
}
