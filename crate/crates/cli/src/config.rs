use std::path::{Path, PathBuf};

use blidkit::funcspace::{NormFamilyDescriptor, NormKind, DEFAULT_K_MAX, DEFAULT_Q_CAP};
use blidkit::linearize::LinearizationProblem;
use blidkit::BumpFunction;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CertifyBlid,
    ExtendDemo,
    Diffcheck,
    Linearize,
    FullSuite,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::CertifyBlid => "certify-blid",
            Command::ExtendDemo => "extend-demo",
            Command::Diffcheck => "diffcheck",
            Command::Linearize => "linearize",
            Command::FullSuite => "full-suite",
        }
    }
}

/// A norm family; `q_cap` and `k_max` default to the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: NormKind,
    #[serde(default = "default_q_cap")]
    pub q_cap: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
}

fn default_q_cap() -> usize {
    DEFAULT_Q_CAP
}

fn default_k_max() -> usize {
    DEFAULT_K_MAX
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            kind: NormKind::SupOnT,
            q_cap: DEFAULT_Q_CAP,
            k_max: DEFAULT_K_MAX,
        }
    }
}

impl SpaceConfig {
    pub fn descriptor(&self) -> NormFamilyDescriptor {
        NormFamilyDescriptor {
            kind: self.kind,
            q_cap: self.q_cap,
            k_max: self.k_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Samples per certification or bound estimate.
    pub samples: usize,
    /// Directions per differentiability check.
    pub directions: usize,
    /// Random inputs for the extension fuzz test.
    pub fuzz: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            samples: 200,
            directions: 16,
            fuzz: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendConfig {
    #[serde(default = "default_f_name")]
    pub f_name: String,
    #[serde(default = "default_domain_radius")]
    pub domain_radius: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_f_name() -> String {
    "square".into()
}

fn default_domain_radius() -> f64 {
    1.0
}

fn default_margin() -> f64 {
    blidkit::germ::DEFAULT_MARGIN
}

impl Default for ExtendConfig {
    fn default() -> Self {
        Self {
            f_name: default_f_name(),
            domain_radius: default_domain_radius(),
            margin: default_margin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffcheckConfig {
    /// `blid` for the blid map of the space, or a germ catalog name whose
    /// global extension is checked.
    #[serde(default = "default_map")]
    pub map: String,
    #[serde(default = "default_domain_radius")]
    pub domain_radius: f64,
}

fn default_map() -> String {
    "blid".into()
}

impl Default for DiffcheckConfig {
    fn default() -> Self {
        Self {
            map: default_map(),
            domain_radius: default_domain_radius(),
        }
    }
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub bump: BumpFunction,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    /// Not part of the report, so that reports compare equal across
    /// output locations.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub extend: ExtendConfig,
    #[serde(default)]
    pub diffcheck: DiffcheckConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linearize: Option<LinearizationProblem>,
}

impl ExperimentConfig {
    /// Parses JSON, naming the offending field on error.
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "config".to_string() } else { path };
            RunError::Config {
                field,
                message: e.into_inner().to_string(),
            }
        })?;
        if config.command == Command::Linearize && config.linearize.is_none() {
            return Err(RunError::Config {
                field: "linearize".into(),
                message: "missing field `linearize` (with `matrix`, `f_name`, ...) for the linearize command".into(),
            });
        }
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Config {
            field: "--config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_json(&text)
    }
}
