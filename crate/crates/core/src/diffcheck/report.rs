use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const DISCLAIMER: &str = "numerical evidence from finite-difference remainders; not a proof of differentiability";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    Bounded,
    Compact,
    Frechet,
}

impl Notion {
    pub fn as_str(self) -> &'static str {
        match self {
            Notion::Bounded => "bounded",
            Notion::Compact => "compact",
            Notion::Frechet => "frechet",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub direction_id: usize,
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentiabilityReport {
    pub notion: Notion,
    pub disclaimer: String,
    /// `‖r‖/t` for every (direction, t).
    pub ratios: Vec<RatioRow>,
    /// Fitted log-log slopes: one per direction, or one for the sup over the
    /// set for the bounded notion. `None` when the series sits at the noise
    /// floor.
    pub decay_slopes: Vec<Option<f64>>,
    pub final_ratio: f64,
    pub noise_floor: f64,
    pub slope_threshold: f64,
    pub ratio_threshold: f64,
    /// Radius of the bounded set `S` (bounded notion only).
    pub set_radius: Option<f64>,
    pub seed: Option<u64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleReport {
    pub disclaimer: String,
    pub errors: Vec<f64>,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Flat table `notion, direction_id, t, ratio` for plotting.
pub fn write_ratios_csv(reports: &[DifferentiabilityReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["notion", "direction_id", "t", "ratio"])?;
    for r in reports {
        for row in &r.ratios {
            w.write_record([
                r.notion.as_str().to_string(),
                row.direction_id.to_string(),
                format!("{:e}", row.t),
                format!("{:e}", row.ratio),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
