//! One benchmark per value of a single parameter.

use std::str::FromStr;

use guidemap_core::guidance::parse_layout;
use serde::{Deserialize, Serialize};

use crate::benchmark::{prepare_scenes, run_prepared, BenchConfig, BenchmarkReport};
use crate::dataset::DatasetInstance;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Layout,
    K,
    F2,
}

impl FromStr for SweepParam {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "layout" => Ok(Self::Layout),
            "k" => Ok(Self::K),
            "f2" => Ok(Self::F2),
            other => Err(BenchError::Config(format!(
                "unknown sweep parameter {other:?}"
            ))),
        }
    }
}

/// Layouts compared in the guidance ablation.
pub const LAYOUT_VALUES: [&str; 4] = ["euclidean", "sp", "sp-obj", "sp-obj-iter"];
pub const K_VALUES: [&str; 3] = ["16", "64", "256"];
/// Upper area tolerances of the f2 ablation.
pub const F2_VALUES: [&str; 7] = ["1.1", "1.2", "1.5", "2", "3", "6", "inf"];

impl SweepParam {
    pub fn default_values(self) -> &'static [&'static str] {
        match self {
            Self::Layout => &LAYOUT_VALUES,
            Self::K => &K_VALUES,
            Self::F2 => &F2_VALUES,
        }
    }
}

/// Parses an f2 value; `inf` (any case) means no upper bound.
pub fn parse_f2(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| BenchError::Config(format!("bad f2 value {s:?}")))
}

fn apply(base: &BenchConfig, param: SweepParam, value: &str) -> Result<BenchConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::Layout => {
            parse_layout(value)?;
            cfg.layout = value.to_owned();
        }
        SweepParam::K => {
            cfg.k = value
                .trim()
                .parse()
                .map_err(|_| BenchError::Config(format!("bad k value {value:?}")))?;
        }
        SweepParam::F2 => {
            cfg.scale_params.f2 = parse_f2(value)?;
            cfg.scale_params.validate()?;
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub param: SweepParam,
    pub values: Vec<String>,
    pub reports: Vec<BenchmarkReport>,
}

pub fn sweep(
    instances: &[DatasetInstance],
    param: SweepParam,
    values: &[String],
    base: &BenchConfig,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(BenchError::Config("sweep needs at least one value".into()));
    }
    if instances.is_empty() {
        return Err(BenchError::EmptyDataset);
    }
    let configs = values
        .iter()
        .map(|v| apply(base, param, v))
        .collect::<Result<Vec<_>>>()?;
    // Superpixels only depend on k, so other sweeps share one preparation.
    let shared = (param != SweepParam::K).then(|| prepare_scenes(instances, base));
    let reports = configs
        .iter()
        .map(|cfg| match &shared {
            Some(scenes) => run_prepared(instances, scenes, cfg),
            None => run_prepared(instances, &prepare_scenes(instances, cfg), cfg),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        param,
        values: values.to_vec(),
        reports,
    })
}
