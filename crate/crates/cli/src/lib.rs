//! Batch experiments over the blidkit library: configuration, execution and
//! report files.
//!
//! A run writes `report.json` (schema below) and CSV side tables into the
//! output directory. `report.json` is deterministic for a given config and
//! seed except for its `metadata` object.

pub mod config;
pub mod experiments;

use std::path::{Path, PathBuf};

use blidkit::blid::{blid_windowed_family, BlidMap};
use blidkit::diffcheck::write_ratios_csv;
use blidkit::funcspace::{NormFamilyDescriptor, NormKind};
use blidkit::linearize::LinearizationProblem;
use blidkit::BlidError;
use serde::Serialize;

pub use config::{Command, ExperimentConfig};
pub use experiments::{Case, Outcome};

pub const SCHEMA_VERSION: u32 = 1;
/// Default output directory when neither `--output` nor the config names one.
pub const OUTPUT_DIR_ENV: &str = "BLIDKIT_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Run(#[from] BlidError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub generated_at_unix: u64,
    pub tool_version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'static str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub cases: &'a [Case],
    pub pass: bool,
    /// Excluded from determinism comparisons.
    pub metadata: Metadata,
}

/// Result of [`run`]: the verdicts and where the report went.
#[derive(Debug)]
pub struct RunSummary {
    pub pass: bool,
    pub cases: Vec<Case>,
    pub report_path: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}

/// Runs the configured experiment and writes its report files into `output_dir`.
pub fn run(config: &ExperimentConfig, output_dir: &Path) -> Result<RunSummary, RunError> {
    let mut out = Outcome::default();
    let (seed, budgets) = (config.seed, &config.budgets);
    match config.command {
        Command::CertifyBlid => {
            experiments::certify_space(&mut out, &config.space, config.bump, budgets.samples, seed)?;
        }
        Command::ExtendDemo => {
            experiments::extend_demo(&mut out, &config.space, config.bump, &config.extend, budgets, seed)?;
        }
        Command::Diffcheck => {
            let d = &config.diffcheck;
            experiments::diffcheck_space(&mut out, &config.space, config.bump, &d.map, d.domain_radius, true, budgets, seed)?;
        }
        Command::Linearize => {
            let problem = config.linearize.as_ref().expect("validated when parsed");
            experiments::linearize_case(&mut out, "problem", problem, seed)?;
        }
        Command::FullSuite => full_suite(&mut out, config)?,
    }
    write_outputs(config, &out, output_dir)
}

fn descriptor(kind: NormKind, q_cap: usize, k_max: usize) -> config::SpaceConfig {
    config::SpaceConfig { kind, q_cap, k_max }
}

/// The 2-D saddle `Λ = diag(2, 1/2)`, `f(x) = (x₂², x₁²)`, `δ = 0.1`.
pub fn saddle_problem() -> LinearizationProblem {
    serde_json::from_value(serde_json::json!({
        "matrix": [[2.0, 0.0], [0.0, 0.5]], "f_name": "swap_square", "alpha": 1.0, "delta": 0.1,
        "bump": {"r_in": 1.0, "r_out": 2.0}, "box_radius": 0.25, "grid_n": 101, "tol": 1e-12
    }))
    .expect("valid problem")
}

/// `F(x) = 2x + x²` on the line, `δ = 0.1`.
pub fn expanding_problem() -> LinearizationProblem {
    serde_json::from_value(serde_json::json!({
        "matrix": [[2.0]], "f_name": "square", "alpha": 1.0, "delta": 0.1,
        "bump": {"r_in": 1.0, "r_out": 2.0}, "box_radius": 0.25, "grid_n": 4001, "tol": 1e-13
    }))
    .expect("valid problem")
}

/// Every experiment at desk scale, with pointwise `abs` as the intended-fail
/// control.
fn full_suite(out: &mut Outcome, config: &ExperimentConfig) -> Result<(), RunError> {
    let (seed, budgets, bump) = (config.seed, &config.budgets, config.bump);
    experiments::certify_space(out, &descriptor(NormKind::SupOnT, 0, 1), bump, budgets.samples, seed)?;
    for q in 1..=3 {
        experiments::certify_space(out, &descriptor(NormKind::CqInterval, q, 1), bump, budgets.samples, seed)?;
    }
    let family = NormFamilyDescriptor::new(NormKind::CInfInterval, 6, 4)?;
    experiments::certify_maps(out, &blid_windowed_family(&family, bump)?, budgets.samples, seed)?;
    let finite: Vec<BlidMap> = (1..=3).map(|n| BlidMap::finite_dim(bump, n)).collect::<Result<_, _>>()?;
    experiments::certify_maps(out, &finite, budgets.samples, seed)?;

    let square = config::ExtendConfig::default();
    for space in [descriptor(NormKind::SupOnT, 0, 1), descriptor(NormKind::CqInterval, 2, 1)] {
        experiments::extend_demo(out, &space, bump, &square, budgets, seed)?;
    }

    let c0 = descriptor(NormKind::SupOnT, 0, 1);
    let c2 = descriptor(NormKind::CqInterval, 2, 1);
    for (space, map) in [(c0, "blid"), (c2, "blid"), (c0, "square"), (c0, "exp_minus_one"), (c2, "square")] {
        experiments::diffcheck_space(out, &space, bump, map, 1.0, true, budgets, seed)?;
    }
    experiments::diffcheck_space(out, &c0, bump, "abs", 1.0, false, budgets, seed)?;
    experiments::chain_rule_case(out, bump, "exp_minus_one", budgets, seed)?;

    experiments::linearize_case(out, "saddle_2d", &saddle_problem(), seed)?;
    experiments::linearize_case(out, "expanding_1d", &expanding_problem(), seed)?;
    Ok(())
}

fn write_outputs(config: &ExperimentConfig, out: &Outcome, dir: &Path) -> Result<RunSummary, RunError> {
    std::fs::create_dir_all(dir)?;
    let pass = out.all_ok();
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: config.command.as_str(),
        seed: config.seed,
        config,
        cases: &out.cases,
        pass,
        metadata: Metadata {
            generated_at_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            tool_version: env!("CARGO_PKG_VERSION"),
        },
    };
    let report_path = dir.join("report.json");
    let text = serde_json::to_string_pretty(&report).map_err(BlidError::from)?;
    std::fs::write(&report_path, text + "\n")?;

    let mut cases = csv::Writer::from_path(dir.join("cases.csv")).map_err(BlidError::from)?;
    cases
        .write_record(["name", "kind", "expected_pass", "pass", "ok"])
        .map_err(BlidError::from)?;
    for c in &out.cases {
        cases
            .write_record([&c.name, &c.kind, &c.expected_pass.to_string(), &c.pass.to_string(), &c.ok.to_string()])
            .map_err(BlidError::from)?;
    }
    cases.flush()?;

    if !out.certifications.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("certification.csv")).map_err(BlidError::from)?;
        w.write_record(["construction", "empirical_identity_radius", "identity_deviation", "empirical_bound", "claimed_bound", "samples", "seed", "pass"])
            .map_err(BlidError::from)?;
        for r in &out.certifications {
            w.write_record([
                r.construction.clone(),
                format!("{:e}", r.empirical_identity_radius),
                format!("{:e}", r.identity_deviation),
                format!("{:e}", r.empirical_bound),
                r.claimed_bound.map(|b| format!("{b:e}")).unwrap_or_default(),
                r.samples.to_string(),
                r.seed.to_string(),
                r.pass.to_string(),
            ])
            .map_err(BlidError::from)?;
        }
        w.flush()?;
    }
    if !out.differentiability.is_empty() {
        let reports: Vec<_> = out.differentiability.iter().map(|(_, r)| r.clone()).collect();
        write_ratios_csv(&reports, &dir.join("ratios.csv"))?;
    }
    for (name, result) in &out.conjugacies {
        result.write_table_csv(&dir.join(format!("conjugacy_{name}.csv")))?;
    }
    Ok(RunSummary {
        pass,
        cases: out.cases.clone(),
        report_path,
    })
}

/// `--output`, then the config's `output_dir`, then `$BLIDKIT_OUTPUT_DIR`,
/// then `./blidkit-out`.
pub fn resolve_output_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("blidkit-out"))
}
