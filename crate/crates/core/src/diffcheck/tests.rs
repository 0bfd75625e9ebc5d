use super::*;
use crate::blid::BlidMap;
use crate::bump::BumpFunction;
use crate::error::Result;
use crate::funcspace::{norm_sup, GridFunction};

fn sup(x: &GridFunction) -> f64 {
    norm_sup(x)
}

fn norms() -> NormPair<'static, GridFunction, GridFunction> {
    NormPair {
        source: &sup,
        target: &sup,
    }
}

fn constant(v: f64) -> GridFunction {
    GridFunction::constant(0.0, 1.0, 64, v).unwrap()
}

fn square(x: &GridFunction) -> Result<GridFunction> {
    Ok(x.map(|u| u * u))
}

fn abs(x: &GridFunction) -> Result<GridFunction> {
    Ok(x.map(f64::abs))
}

fn directions() -> Vec<GridFunction> {
    random_directions(&constant(0.0), DEFAULT_DIRECTIONS, 7, &sup)
}

#[test]
fn schedule_validation() {
    assert!(StepSchedule::new(vec![1e-1, 1e-2]).is_ok());
    assert!(StepSchedule::new(vec![1e-2, 1e-1]).is_err());
    assert!(StepSchedule::new(vec![1e-1, 0.0]).is_err());
    assert_eq!(StepSchedule::default().steps().len(), 6);
}

#[test]
fn derivative_examples() {
    let s = StepSchedule::default();
    let v = constant(1.0);
    let id = |x: &GridFunction| -> Result<GridFunction> { Ok(x.clone()) };
    let d: GridFunction = directional_derivative(&id, &constant(0.3), &v, &s, &sup).unwrap();
    assert!(d.samples().iter().all(|u| (u - 1.0).abs() < 1e-9));
    let c = |_: &GridFunction| -> Result<GridFunction> { Ok(constant(4.0)) };
    let d: GridFunction = directional_derivative(&c, &constant(0.3), &v, &s, &sup).unwrap();
    assert!(d.samples().iter().all(|u| u.abs() < 1e-12));
    let d: GridFunction = directional_derivative(&square, &constant(1.0), &v, &s, &sup).unwrap();
    assert!(d.samples().iter().all(|u| (u - 2.0).abs() < 1e-8));
}

#[test]
fn linear_map_has_zero_ratios() {
    let lin = |x: &GridFunction| -> Result<GridFunction> { Ok(x.scaled(3.0)) };
    let r = check_bounded(&lin, &constant(0.2), &directions(), &StepSchedule::default(), norms(), &Thresholds::default())
        .unwrap();
    assert!(r.pass);
    assert!(r.ratios.iter().all(|row| row.ratio < 1e-9));
}

#[test]
fn blid_at_zero_passes_every_notion() {
    let h = BlidMap::pointwise_c0(BumpFunction::default());
    let f = |x: &GridFunction| h.apply_c0(x);
    let s = StepSchedule::default();
    let th = Thresholds::default();
    let x = constant(0.0);
    assert!(check_bounded(&f, &x, &directions(), &s, norms(), &th).unwrap().pass);
    let seqs: Vec<_> = directions()
        .into_iter()
        .map(|h| HSequence::perturbed(h, &constant(1.0), s.steps()))
        .collect();
    assert!(check_compact(&f, &x, &seqs, s.steps(), &s, norms(), &th).unwrap().pass);
    assert!(check_frechet(&f, &x, &s, norms(), 16, 3, &th).unwrap().pass);
}

#[test]
fn square_decays_with_slope_one() {
    let s = StepSchedule::default();
    let r = check_frechet(&square, &constant(0.4), &s, norms(), 8, 1, &Thresholds::default()).unwrap();
    assert!(r.pass);
    for slope in r.decay_slopes.iter().flatten() {
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }
}

#[test]
fn abs_fails_at_zero() {
    let s = StepSchedule::default();
    let th = Thresholds::default();
    let x = constant(0.0);
    assert!(!check_bounded(&abs, &x, &directions(), &s, norms(), &th).unwrap().pass);
    assert!(!check_frechet(&abs, &x, &s, norms(), 16, 2, &th).unwrap().pass);
}

#[test]
fn compact_constant_sequence_and_alternating_signs() {
    let s = StepSchedule::default();
    let th = Thresholds::default();
    let x = constant(0.3);
    let seqs: Vec<_> = directions()
        .into_iter()
        .map(|h| HSequence::constant(h, s.steps().len()))
        .collect();
    let plain = check_compact(&square, &x, &seqs, s.steps(), &s, norms(), &th).unwrap();
    let alternating: Vec<f64> = s
        .steps()
        .iter()
        .enumerate()
        .map(|(i, t)| if i % 2 == 0 { *t } else { -t })
        .collect();
    let alt = check_compact(&square, &x, &seqs, &alternating, &s, norms(), &th).unwrap();
    assert!(plain.pass && alt.pass);
}

#[test]
fn chain_rule_through_blid_at_zero() {
    let h = BlidMap::pointwise_c0(BumpFunction::default());
    let g = |x: &GridFunction| h.apply_c0(x);
    let f = |x: &GridFunction| -> Result<GridFunction> { Ok(x.map(f64::exp_m1)) };
    let r = check_chain_rule(&f, &g, &constant(0.0), &directions(), &StepSchedule::default(), &sup, &sup, &sup)
        .unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn slope_fit_and_csv() {
    let steps = [1e-1, 1e-2, 1e-3];
    let ratios = [1e-1, 1e-2, 1e-3];
    assert!((fit_slope(&steps, &ratios, 0.0).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(fit_slope(&steps, &ratios, 1.0), None);
    let r = check_frechet(&square, &constant(0.4), &StepSchedule::default(), norms(), 2, 1, &Thresholds::default())
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ratios.csv");
    write_ratios_csv(&[r], &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("notion,direction_id,t,ratio\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 6);
}

#[test]
fn deterministic_given_seed() {
    let s = StepSchedule::default();
    let a = check_frechet(&square, &constant(0.4), &s, norms(), 8, 5, &Thresholds::default()).unwrap();
    let b = check_frechet(&square, &constant(0.4), &s, norms(), 8, 5, &Thresholds::default()).unwrap();
    assert_eq!(a, b);
}
