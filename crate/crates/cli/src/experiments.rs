//! The individual experiments. Each appends verdict cases and side tables
//! to an [`Outcome`].

use std::sync::Arc;

use blidkit::blid::{blid_windowed_family, certify_blid, BlidDomain, CertificationReport};
use blidkit::diffcheck::{
    check_all_notions, check_chain_rule, random_directions, DifferentiabilityReport, NormPair, StepSchedule,
    Thresholds,
};
use blidkit::funcspace::sampling::{sample_rng, stratified_amplitude, RandomLike};
use blidkit::funcspace::{norm_q, norm_sup, GridFunction, JetGridFunction, NormFamilyDescriptor, NormKind};
use blidkit::germ::{blid_into_ball, extend, CatalogDomain, GermDomain, LocalMap, SourceSpace};
use blidkit::linearize::{run_linearization, ConjugacyResult, LinearizationProblem};
use blidkit::{BlidError, BlidMap, BumpFunction};
use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Budgets, SpaceConfig};
use crate::RunError;

/// One verdict. `ok` is `pass == expected_pass`; controls that are meant to
/// fail have `expected_pass = false`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub name: String,
    pub kind: String,
    pub expected_pass: bool,
    pub pass: bool,
    pub ok: bool,
    pub detail: Value,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub cases: Vec<Case>,
    pub certifications: Vec<CertificationReport>,
    pub differentiability: Vec<(String, DifferentiabilityReport)>,
    pub conjugacies: Vec<(String, ConjugacyResult)>,
}

impl Outcome {
    fn push(&mut self, name: impl Into<String>, kind: &str, expected_pass: bool, pass: bool, detail: impl Serialize) -> Result<(), RunError> {
        self.cases.push(Case {
            name: name.into(),
            kind: kind.into(),
            expected_pass,
            pass,
            ok: pass == expected_pass,
            detail: serde_json::to_value(detail).map_err(BlidError::from)?,
        });
        Ok(())
    }

    pub fn all_ok(&self) -> bool {
        self.cases.iter().all(|c| c.ok)
    }
}

fn config_error(field: &str, e: BlidError) -> RunError {
    match e {
        BlidError::Configuration(m) | BlidError::Argument(m) => RunError::Config {
            field: field.into(),
            message: m,
        },
        other => RunError::Run(other),
    }
}

fn jet_zero(d: &NormFamilyDescriptor) -> Result<JetGridFunction, RunError> {
    let l = d.layout();
    Ok(JetGridFunction::zero(d.q_cap, l.lo, l.hi, l.intervals)?)
}

fn grid_zero(d: &NormFamilyDescriptor) -> Result<GridFunction, RunError> {
    let l = d.layout();
    Ok(GridFunction::constant(l.lo, l.hi, l.intervals, 0.0)?)
}

/// Certifies the blid constructions of `space`: the pointwise map, the jet
/// map of order `q_cap`, or every member of the windowed family.
pub fn certify_space(out: &mut Outcome, space: &SpaceConfig, bump: BumpFunction, samples: usize, seed: u64) -> Result<(), RunError> {
    let d = space.descriptor();
    let maps = match d.kind {
        NormKind::SupOnT => vec![BlidMap::pointwise_c0(bump)],
        NormKind::CqInterval => vec![BlidMap::jet_cq(bump, d.q_cap).map_err(|e| config_error("space.q_cap", e))?],
        _ => blid_windowed_family(&d, bump).map_err(|e| config_error("space", e))?,
    };
    certify_maps(out, &maps, samples, seed)
}

pub fn certify_maps(out: &mut Outcome, maps: &[BlidMap], samples: usize, seed: u64) -> Result<(), RunError> {
    for h in maps {
        let r = certify_blid(h, samples, seed)?;
        out.push(format!("certify/{}", r.construction), "certification", true, r.pass, &r)?;
        out.certifications.push(r);
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExtensionDetail {
    f_name: String,
    space: SourceSpace,
    domain_radius: f64,
    margin: f64,
    identity_radius: f64,
    image_bound: Option<f64>,
    agreement_samples: usize,
    max_agreement_deviation: f64,
    fuzz_inputs: usize,
    max_fuzz_amplitude: f64,
    domain_faults: usize,
    seed: u64,
}

/// Tolerance on `|F(x) − f(x)|` inside the identity region.
pub const AGREEMENT_TOLERANCE: f64 = 1e-12;

fn extension_case<X>(
    out: &mut Outcome,
    template: X,
    space: SourceSpace,
    bump: BumpFunction,
    cfg: &crate::config::ExtendConfig,
    budgets: &Budgets,
    seed: u64,
) -> Result<(), RunError>
where
    X: GermDomain + CatalogDomain + RandomLike + 'static,
{
    let f = LocalMap::<X>::from_catalog(&cfg.f_name, space, cfg.domain_radius).map_err(|e| config_error("extend.f_name", e))?;
    let global = extend(f.clone(), bump, cfg.margin).map_err(|e| config_error("extend", e))?;
    let h = global.inner().clone();
    let radius = global.identity_radius();

    let mut deviation: f64 = 0.0;
    let mut agreement = 0;
    for i in 0..budgets.samples {
        let mut rng = sample_rng(seed, i as u64);
        let amp = radius * (1.0 - 1e-9) * rng.gen_range(0.0..1.0);
        let x = template.random_like(&mut rng, amp);
        if x.governing_norm(&h) >= radius {
            continue;
        }
        agreement += 1;
        let (a, b) = (global.apply(&x)?, f.apply(&x)?);
        deviation = deviation.max(a.identity_deviation(&b));
    }

    let mut faults = 0;
    let mut max_amp: f64 = 0.0;
    for i in 0..budgets.fuzz {
        let mut rng = sample_rng(seed.wrapping_add(1 << 40), i as u64);
        let amp = stratified_amplitude(i) * rng.gen_range(0.5..1.0);
        max_amp = max_amp.max(amp);
        match global.apply(&template.random_like(&mut rng, amp)) {
            Err(BlidError::DomainFault { .. }) => faults += 1,
            Err(e) => return Err(e.into()),
            Ok(_) => {}
        }
    }
    let detail = ExtensionDetail {
        f_name: cfg.f_name.clone(),
        space,
        domain_radius: cfg.domain_radius,
        margin: cfg.margin,
        identity_radius: radius,
        image_bound: h.claimed_bound(),
        agreement_samples: agreement,
        max_agreement_deviation: deviation,
        fuzz_inputs: budgets.fuzz,
        max_fuzz_amplitude: max_amp,
        domain_faults: faults,
        seed,
    };
    let pass = faults == 0 && agreement > 0 && deviation <= AGREEMENT_TOLERANCE;
    out.push(format!("extend/{}/{}", cfg.f_name, kind_name(&space)), "extension", true, pass, &detail)
}

fn kind_name(space: &SourceSpace) -> String {
    match space {
        SourceSpace::Function(d) => serde_json::to_value(d.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        SourceSpace::Euclidean { dim } => format!("euclidean_{dim}"),
    }
}

pub fn extend_demo(out: &mut Outcome, space: &SpaceConfig, bump: BumpFunction, cfg: &crate::config::ExtendConfig, budgets: &Budgets, seed: u64) -> Result<(), RunError> {
    let d = space.descriptor();
    let source = SourceSpace::Function(d);
    match d.kind {
        NormKind::SupOnT => extension_case(out, grid_zero(&d)?, source, bump, cfg, budgets, seed),
        _ => extension_case(out, jet_zero(&d)?, source, bump, cfg, budgets, seed),
    }
}

fn sup_norm(x: &GridFunction) -> f64 {
    norm_sup(x)
}

fn q_norm(x: &JetGridFunction) -> f64 {
    norm_q(x)
}

fn record_notions(out: &mut Outcome, label: &str, expected: bool, reports: [DifferentiabilityReport; 3]) -> Result<(), RunError> {
    for r in reports {
        out.push(format!("diffcheck/{label}/{}", r.notion.as_str()), "differentiability", expected, r.pass, &r)?;
        out.differentiability.push((label.to_string(), r));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn notion_cases<X>(
    out: &mut Outcome,
    label: &str,
    expected: bool,
    f: &(dyn Fn(&X) -> blidkit::Result<X> + Sync),
    x: &X,
    norm: &(dyn Fn(&X) -> f64 + Sync),
    budgets: &Budgets,
    seed: u64,
) -> Result<(), RunError>
where
    X: BlidDomain + RandomLike,
{
    let norms = NormPair { source: norm, target: norm };
    let reports = check_all_notions(f, x, &StepSchedule::default(), norms, budgets.directions, seed, &Thresholds::default())?;
    record_notions(out, label, expected, reports)
}

/// Checks the three notions at 0 for the blid map of `space` (`map = "blid"`)
/// or the global extension of a germ catalog map. Pointwise `abs` is the
/// known non-differentiable control.
#[allow(clippy::too_many_arguments)]
pub fn diffcheck_space(out: &mut Outcome, space: &SpaceConfig, bump: BumpFunction, map: &str, domain_radius: f64, expected: bool, budgets: &Budgets, seed: u64) -> Result<(), RunError> {
    let d = space.descriptor();
    let label = format!("{map}/{}", kind_name(&SourceSpace::Function(d)));
    match d.kind {
        NormKind::SupOnT => {
            let x = grid_zero(&d)?;
            let f = germ_or_blid::<GridFunction>(map, SourceSpace::Function(d), bump, domain_radius)?;
            notion_cases(out, &label, expected, &*f, &x, &sup_norm, budgets, seed)
        }
        NormKind::CqInterval => {
            let x = jet_zero(&d)?;
            let f = germ_or_blid::<JetGridFunction>(map, SourceSpace::Function(d), bump, domain_radius)?;
            notion_cases(out, &label, expected, &*f, &x, &q_norm, budgets, seed)
        }
        _ => Err(RunError::Config {
            field: "space.kind".into(),
            message: "diffcheck runs on sup_on_t and cq_interval spaces".into(),
        }),
    }
}

type Checked<X> = Arc<dyn Fn(&X) -> blidkit::Result<X> + Send + Sync>;

fn germ_or_blid<X>(map: &str, space: SourceSpace, bump: BumpFunction, domain_radius: f64) -> Result<Checked<X>, RunError>
where
    X: GermDomain + CatalogDomain + 'static,
{
    if map == "blid" {
        let h = match space {
            SourceSpace::Function(d) if d.kind == NormKind::CqInterval => {
                BlidMap::jet_cq(bump, d.q_cap).map_err(|e| config_error("space.q_cap", e))?
            }
            _ => BlidMap::pointwise_c0(bump),
        };
        return Ok(Arc::new(move |x: &X| x.blid_apply(&h)));
    }
    let f = LocalMap::<X>::from_catalog(map, space, domain_radius).map_err(|e| config_error("diffcheck.map", e))?;
    let global = extend(f, bump, blidkit::germ::DEFAULT_MARGIN).map_err(|e| config_error("diffcheck", e))?;
    Ok(Arc::new(move |x: &X| global.apply(x)))
}

/// `D(f∘H)(0) = Df(H(0))·DH(0)` for a local germ `f` and the blid map into
/// its ball, on `C(T)`.
pub fn chain_rule_case(out: &mut Outcome, bump: BumpFunction, f_name: &str, budgets: &Budgets, seed: u64) -> Result<(), RunError> {
    let d = NormFamilyDescriptor::with_defaults(NormKind::SupOnT);
    let space = SourceSpace::Function(d);
    let f = LocalMap::<GridFunction>::from_catalog(f_name, space, 1.0).map_err(|e| config_error("diffcheck.map", e))?;
    let h = blid_into_ball(&space, bump, blidkit::germ::DEFAULT_MARGIN)?;
    let x = grid_zero(&d)?;
    let dirs = random_directions(&x, budgets.directions, seed, &sup_norm);
    let outer = |y: &GridFunction| f.apply(y);
    let inner = |y: &GridFunction| y.blid_apply(&h);
    let r = check_chain_rule(&outer, &inner, &x, &dirs, &StepSchedule::default(), &sup_norm, &sup_norm, &sup_norm)?;
    out.push(format!("chain_rule/{f_name}/sup_on_t"), "chain_rule", true, r.pass, &r)
}

pub fn linearize_case(out: &mut Outcome, name: &str, problem: &LinearizationProblem, seed: u64) -> Result<(), RunError> {
    let (report, result) = run_linearization(problem, seed).map_err(|e| config_error("linearize", e))?;
    out.push(format!("linearize/{name}"), "linearization", true, report.pass, &report)?;
    out.conjugacies.push((name.to_string(), result));
    Ok(())
}
