use std::sync::Arc;

use proptest::prelude::*;

use blidkit::blid::BlidDomain;
use blidkit::funcspace::sampling::{random_jet, random_smooth_grid, sample_rng};
use blidkit::funcspace::{
    frechet_metric, iterated_integral, iterated_integral_on_grid, norm_q, norm_sup, norm_windowed, GridFunction,
    GridLayout, JetGridFunction, NormFamilyDescriptor, NormKind, Vector,
};
use blidkit::germ::{extend, LocalMap, SourceSpace};
use blidkit::linearize::{conjugacy_iterate, globalize_perturbation, HyperbolicLinear, PerturbationSpec, VectorMap};
use blidkit::{BlidMap, BumpFunction};

fn bump() -> BumpFunction {
    BumpFunction::new(1.0, 2.0).unwrap()
}

fn unit() -> GridLayout {
    GridLayout::unit_interval()
}

fn smooth(seed: u64, amp: f64) -> GridFunction {
    random_smooth_grid(&mut sample_rng(seed, 0), &unit(), amp)
}

fn jet(seed: u64, q: usize, layout: &GridLayout, amp: f64) -> JetGridFunction {
    random_jet(&mut sample_rng(seed, 0), q, layout, amp)
}

fn real_line() -> NormFamilyDescriptor {
    NormFamilyDescriptor::new(NormKind::WindowedRealLine, 3, 4).unwrap()
}

/// Cumulative trapezoid from 0, node by node.
fn cumulative(g: &GridFunction) -> GridFunction {
    let h = g.spacing();
    let s = g.samples();
    let mut out = vec![0.0; s.len()];
    for i in 1..s.len() {
        out[i] = out[i - 1] + 0.5 * h * (s[i - 1] + s[i]);
    }
    GridFunction::new(g.lo(), g.hi(), out).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_homogeneous_and_subadditive(s1 in any::<u64>(), s2 in any::<u64>(), alpha in -50.0f64..50.0, amp in 1e-3f64..1e3) {
        let (x, y) = (smooth(s1, amp), smooth(s2, 1.0));
        prop_assert!((norm_sup(&x.scaled(alpha)) - alpha.abs() * norm_sup(&x)).abs() <= 1e-12 * (1.0 + alpha.abs() * amp));
        prop_assert!(norm_sup(&x.add_scaled(1.0, &y)) <= norm_sup(&x) + norm_sup(&y) + 1e-12 * amp);

        let (a, b) = (jet(s1, 2, &unit(), amp), jet(s2, 2, &unit(), 1.0));
        let scale = 1e-12 * (1.0 + alpha.abs()) * norm_q(&a);
        prop_assert!((norm_q(&a.scaled(alpha)) - alpha.abs() * norm_q(&a)).abs() <= scale);
        prop_assert!(norm_q(&a.add_scaled(1.0, &b)) <= norm_q(&a) + norm_q(&b) + 1e-12 * norm_q(&a).max(1.0));
    }

    #[test]
    fn windowed_norms_increase_with_k(seed in any::<u64>(), amp in 1e-2f64..1e2) {
        for d in [real_line(), NormFamilyDescriptor::new(NormKind::CInfInterval, 4, 6).unwrap()] {
            let x = jet(seed, d.q_cap, &d.layout(), amp);
            let norms: Vec<f64> = (0..=d.k_max).map(|k| norm_windowed(&x, k, &d)).collect();
            prop_assert!(norms.windows(2).all(|w| w[0] <= w[1]), "{norms:?}");
        }
    }

    #[test]
    fn frechet_metric_axioms(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let d = real_line();
        let (x, y, z) = (jet(s1, 3, &d.layout(), 1.0), jet(s2, 3, &d.layout(), 5.0), jet(s3, 3, &d.layout(), 0.1));
        let dxy = frechet_metric(&x, &y, &d).unwrap();
        prop_assert!((dxy - frechet_metric(&y, &x, &d).unwrap()).abs() <= 1e-10);
        prop_assert_eq!(frechet_metric(&x, &x, &d).unwrap(), 0.0);
        prop_assert!(dxy > 0.0);
        prop_assert!(dxy <= frechet_metric(&x, &z, &d).unwrap() + frechet_metric(&z, &y, &d).unwrap() + 1e-10);
    }

    #[test]
    fn cauchy_kernel_matches_nested_quadrature(seed in any::<u64>(), m in 1usize..5) {
        let g = smooth(seed, 1.0);
        let direct = iterated_integral_on_grid(&g, m).unwrap();
        let mut nested = g.clone();
        for _ in 0..m {
            nested = cumulative(&nested);
        }
        let tol = 10.0 * g.spacing().powi(2) * norm_sup(&g);
        let gap = norm_sup(&direct.sub(&nested));
        prop_assert!(gap <= tol, "m = {m}: {gap:e} > {tol:e}");
    }

    #[test]
    fn reconstruct_differentiates_polynomials(coeffs in prop::collection::vec(-1.0f64..1.0, 2..6)) {
        // p(t) = Σ c_i t^i with degree deg ≤ q + 1, so the top derivative is
        // at most linear.
        let deg = coeffs.len() - 1;
        let q = deg.saturating_sub(1).max(1);
        let deriv = |j: usize, t: f64| -> f64 {
            (j..=deg)
                .map(|i| coeffs[i] * ((i - j + 1)..=i).map(|f| f as f64).product::<f64>() * t.powi((i - j) as i32))
                .sum()
        };
        let closures: Vec<Box<dyn Fn(f64) -> f64>> = (0..=q).map(|j| Box::new(move |t| deriv(j, t)) as Box<dyn Fn(f64) -> f64>).collect();
        let refs: Vec<&dyn Fn(f64) -> f64> = closures.iter().map(|c| c.as_ref()).collect();
        let x = JetGridFunction::from_derivatives(q, 0.0, 1.0, 65_536, &refs).unwrap();
        for j in 0..=q {
            let r = x.reconstruct(j).unwrap();
            let err = r.nodes().zip(r.samples()).map(|(t, v)| (v - deriv(j, t)).abs()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-8, "order {j}: {err:e}");
        }
    }

    #[test]
    fn bump_range_and_linear_bound(u in -10.0f64..10.0) {
        let b = bump();
        let v = b.eval(u);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(v * u.abs() <= b.linear_bound() + 1e-12);
        if u.abs() <= 1.0 { prop_assert_eq!(v, 1.0); }
        if u.abs() >= 2.0 { prop_assert_eq!(v, 0.0); }
    }

    #[test]
    fn jet_map_matches_displayed_formula(seed in any::<u64>(), q in 1usize..4, amp in 0.1f64..100.0) {
        let b = bump();
        let h = BlidMap::jet_cq(b, q).unwrap();
        let x = jet(seed, q, &unit(), amp);
        let image = x.blid_apply(&h).unwrap().reconstruct(0).unwrap();
        let phi = |u: f64| b.eval(u) * u;
        let top = x.top().map(phi);
        for (i, t) in image.nodes().enumerate() {
            let mut expected = 0.0;
            let mut factorial = 1.0;
            for (j, c) in x.jet().iter().enumerate() {
                if j > 0 { factorial *= j as f64; }
                expected += t.powi(j as i32) / factorial * phi(*c);
            }
            expected += iterated_integral(&top, q, t).unwrap();
            let got = image.samples()[i];
            prop_assert!((got - expected).abs() <= 1e-10 * (1.0 + expected.abs()), "t = {t}: {got} vs {expected}");
        }
    }

    #[test]
    fn small_inputs_are_fixed_points(seed in any::<u64>(), frac in 0.0f64..0.999) {
        let h = BlidMap::pointwise_c0(bump());
        let x = smooth(seed, frac * h.identity_radius());
        let once = x.blid_apply(&h).unwrap();
        prop_assert_eq!(&once, &x);
        prop_assert_eq!(once.blid_apply(&h).unwrap(), x);
    }

    #[test]
    fn extension_agrees_with_germ(seed in any::<u64>(), frac in 0.0f64..0.999) {
        let space = SourceSpace::function(NormKind::SupOnT);
        let f = LocalMap::<GridFunction>::from_catalog("exp_minus_one", space, 1.0).unwrap();
        let global = extend(f.clone(), bump(), 0.5).unwrap();
        let x = smooth(seed, frac * global.identity_radius());
        prop_assert_eq!(global.apply(&x).unwrap(), f.apply(&x).unwrap());
    }

    #[test]
    fn globalization_is_exact_near_zero(x0 in -1.0f64..1.0, x1 in -1.0f64..1.0, delta in 0.02f64..0.14) {
        let spec = PerturbationSpec::from_catalog("swap_square", 2, 0.3, 1.0, delta).unwrap();
        let g = globalize_perturbation(&spec, &BlidMap::finite_dim(bump(), 2).unwrap()).unwrap();
        let norm = x0.hypot(x1);
        prop_assume!(norm > 0.0);
        let x = [x0 * 0.999 * delta / norm * norm.min(1.0), x1 * 0.999 * delta / norm * norm.min(1.0)];
        prop_assert_eq!(g.apply(&x), vec![x[1] * x[1], x[0] * x[0]]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn conjugacy_fixes_the_origin(delta in 0.02f64..0.1, scale in 1.5f64..3.0) {
        let lambda = HyperbolicLinear::new(&[vec![scale]]).unwrap();
        let spec = PerturbationSpec::from_catalog("square", 1, 0.3, 1.0, delta).unwrap();
        let g = Arc::new(globalize_perturbation(&spec, &BlidMap::finite_dim(bump(), 1).unwrap()).unwrap());
        let map: VectorMap = Arc::new(move |x: &[f64]| g.apply(x));
        let result = conjugacy_iterate(&lambda, map, 2.5 * delta, 201, 1e-12, 300).unwrap();
        prop_assert_eq!(result.phi(&[0.0]).unwrap(), vec![0.0]);
    }
}
