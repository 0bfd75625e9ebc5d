use super::BlidMap;
use crate::error::{argument, BlidError, Result};
use crate::funcspace::NormFamilyDescriptor;

fn check_radius(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(argument(format!("target radius must be positive and finite, got {c}")))
    }
}

/// `H_c(x) = (c/N)·H(N x / c)` with `N` the certified bound of `H`: the image
/// lies in the ball of radius `c` and the identity radius scales by `c/N`.
pub fn blid_scale(h: &BlidMap, c: f64) -> Result<BlidMap> {
    check_radius(c)?;
    if h.metric_bound.is_some() {
        return Err(argument("map is already scaled into a metric ball"));
    }
    let n = h
        .bound_n
        .ok_or_else(|| BlidError::State("blid map has no certified bound".into()))?;
    let mut out = h.clone();
    if n != c {
        out.scale_in = h.scale_in * n / c;
        out.scale_out = h.scale_out * c / n;
    }
    let factor = c / n;
    out.bound_n = Some(c);
    out.analytic_bound = h.analytic_bound * factor;
    out.identity_radius = h.identity_radius * factor;
    out.empirical_bound = h.empirical_bound.map(|e| e * factor);
    Ok(out)
}

/// Smallest integer `k ≥ 0` with `k > 1 - ln c / ln 2`.
pub fn metric_scale_index(c: f64) -> Result<usize> {
    check_radius(c)?;
    let threshold = 1.0 - c.ln() / std::f64::consts::LN_2;
    Ok((threshold.floor() + 1.0).max(0.0) as usize)
}

/// `H_c(x) = (c/4N)·H_k(4N x / c)` with `k` from [`metric_scale_index`] and
/// `N` the certified `‖·‖_k` bound of `H_k`; the image lies in the metric
/// ball `d(·, 0) < c`.
pub fn blid_metric_scale(family: &[BlidMap], c: f64, d: &NormFamilyDescriptor) -> Result<BlidMap> {
    let k = metric_scale_index(c)?;
    if k > d.k_max || k >= family.len() {
        return Err(BlidError::Capacity { needed: k, k_max: d.k_max });
    }
    let member = &family[k];
    if member.k != k || member.family.as_ref().map(|f| f.kind) != Some(d.kind) {
        return Err(argument("family is not indexed by window for this space"));
    }
    if member.is_scaled() {
        return Err(argument("family members must be unscaled"));
    }
    let n = member
        .bound_n
        .ok_or_else(|| BlidError::State(format!("family member {k} has no certified bound")))?;
    let factor = c / (4.0 * n);
    let mut out = member.clone();
    out.scale_in = 1.0 / factor;
    out.scale_out = factor;
    out.bound_n = Some(c / 4.0);
    out.analytic_bound = member.analytic_bound * factor;
    out.identity_radius = member.identity_radius * factor;
    out.empirical_bound = member.empirical_bound.map(|e| e * factor);
    out.metric_bound = Some(c);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blid::blid_windowed_family;
    use crate::bump::BumpFunction;
    use crate::funcspace::{norm_sup, GridFunction, NormKind};

    #[test]
    fn index_rule_arithmetic() {
        assert_eq!(metric_scale_index(2.0).unwrap(), 1);
        assert_eq!(metric_scale_index(0.5).unwrap(), 3);
        assert_eq!(metric_scale_index(0.1).unwrap(), 5);
        assert_eq!(metric_scale_index(0.01).unwrap(), 8);
        assert_eq!(metric_scale_index(100.0).unwrap(), 0);
        assert!(metric_scale_index(0.0).is_err());
    }

    #[test]
    fn scaling_by_own_bound_is_identity() {
        let h = BlidMap::pointwise_c0(BumpFunction::default());
        let s = blid_scale(&h, h.bound_n().unwrap()).unwrap();
        assert_eq!(s.scale_in(), 1.0);
        assert_eq!(s.scale_out(), 1.0);
        assert!(!s.is_scaled());
    }

    #[test]
    fn scaled_identity_and_containment() {
        let h = BlidMap::pointwise_c0(BumpFunction::default());
        let s = blid_scale(&h, 0.1).unwrap();
        assert_eq!(s.kind(), crate::blid::BlidKind::Scaled);
        let small = GridFunction::from_fn(0.0, 1.0, 64, |t| 0.99 * s.identity_radius() * t).unwrap();
        assert_eq!(s.apply_c0(&small).unwrap(), small);
        let big = GridFunction::from_fn(0.0, 1.0, 512, |t| 50.0 * (9.0 * t).sin()).unwrap();
        assert!(norm_sup(&s.apply_c0(&big).unwrap()) < 0.1);
    }

    #[test]
    fn uncertified_bound_is_state_error() {
        let h = BlidMap::pointwise_c0(BumpFunction::default()).without_bound();
        assert!(matches!(blid_scale(&h, 1.0), Err(BlidError::State(_))));
    }

    #[test]
    fn capacity_error_carries_needed_index() {
        let d = NormFamilyDescriptor::new(NormKind::CInfInterval, 6, 4).unwrap();
        let family = blid_windowed_family(&d, BumpFunction::default()).unwrap();
        match blid_metric_scale(&family, 0.01, &d) {
            Err(BlidError::Capacity { needed, k_max }) => assert_eq!((needed, k_max), (8, 4)),
            other => panic!("expected capacity error, got {other:?}"),
        }
        assert!(blid_metric_scale(&family, 0.5, &d).is_ok());
    }
}
