//! The clicks-to-IoU protocol over a dataset.

use guidemap_core::guidance::parse_layout;
use guidemap_core::interaction::{
    run_session, ClickPolicy, EmptySegmenter, OracleSegmenter, ScaleSource, SessionConfig,
    MAX_BUDGET,
};
use guidemap_core::{
    ChannelKind, ReferenceSegmenter, ScaleParams, Scene, SlicParams, StackConfig, TruncationMode,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetInstance;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmenterChoice {
    #[default]
    Reference,
    Oracle,
    Empty,
}

/// Superpixel count used by the benchmark unless overridden.
pub const DEFAULT_K: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Preset name or comma-separated channel list.
    pub layout: String,
    pub k: usize,
    pub compactness: f64,
    pub max_proposals: Option<usize>,
    #[serde(flatten)]
    pub scale_params: ScaleParams,
    pub threshold: f64,
    pub seed: u64,
    pub budget: usize,
    pub segmenter: SegmenterChoice,
    pub reference: ReferenceSegmenter,
    pub truncation: TruncationMode,
    pub scale_source: ScaleSource,
    pub policy: ClickPolicy,
    pub zero_click: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            layout: "full".into(),
            k: DEFAULT_K,
            compactness: SlicParams::default().compactness,
            max_proposals: None,
            scale_params: ScaleParams::default(),
            threshold: 0.9,
            seed: 0,
            budget: MAX_BUDGET,
            segmenter: SegmenterChoice::Reference,
            reference: ReferenceSegmenter::default(),
            truncation: TruncationMode::Saturate,
            scale_source: ScaleSource::Clicks,
            policy: ClickPolicy::Deterministic,
            zero_click: true,
        }
    }
}

impl BenchConfig {
    pub fn slic_params(&self) -> SlicParams {
        SlicParams {
            k: self.k,
            compactness: self.compactness,
            ..SlicParams::default()
        }
    }

    pub fn layout_kinds(&self) -> Result<Vec<ChannelKind>> {
        Ok(parse_layout(&self.layout)?)
    }

    fn session_config(&self, index: usize) -> Result<SessionConfig> {
        let mut cfg = SessionConfig {
            budget: self.budget,
            iou_target: self.threshold,
            layout: self.layout_kinds()?,
            stack: StackConfig {
                truncation: self.truncation,
                allow_scale_fallback: true,
                ..StackConfig::default()
            },
            scale_params: self.scale_params,
            scale_source: self.scale_source,
            zero_click: self.zero_click,
            stop_at_target: false,
            policy: self.policy,
            ..SessionConfig::default()
        };
        cfg.sampling.rng_seed = self.seed.wrapping_add(index as u64);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: String,
    pub noc: usize,
    pub reached: bool,
    pub zero_click_miou: Option<f64>,
    pub final_miou: f64,
    pub clicks: usize,
    /// mIoU after 1..=budget clicks.
    pub curve: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchConfig,
    /// Channel list the layout expanded to.
    pub channels: Vec<ChannelKind>,
    pub instances: Vec<InstanceResult>,
    pub mean_noc: f64,
    pub reached: usize,
    pub zero_click_successes: usize,
    pub failures: usize,
    /// Mean mIoU after 1..=budget clicks.
    pub curve: Vec<f64>,
    pub notes: Vec<String>,
}

impl BenchmarkReport {
    pub fn ids(&self) -> Vec<&str> {
        self.instances.iter().map(|r| r.id.as_str()).collect()
    }
}

/// Instances sorted by id, so results never depend on input order.
fn sorted(instances: &[DatasetInstance]) -> Vec<&DatasetInstance> {
    let mut v: Vec<&DatasetInstance> = instances.iter().collect();
    v.sort_by(|a, b| a.id.cmp(&b.id));
    v
}

/// Superpixels and proposals for each instance, in sorted-id order.
pub fn prepare_scenes(
    instances: &[DatasetInstance],
    cfg: &BenchConfig,
) -> Vec<(String, Result<Scene, String>)> {
    let params = cfg.slic_params();
    sorted(instances)
        .into_par_iter()
        .map(|inst| {
            let scene = Scene::prepare(inst.image.clone(), &params, cfg.max_proposals)
                .map_err(|e| e.to_string());
            (inst.id.clone(), scene)
        })
        .collect()
}

pub fn run_benchmark(instances: &[DatasetInstance], cfg: &BenchConfig) -> Result<BenchmarkReport> {
    if instances.is_empty() {
        return Err(BenchError::EmptyDataset);
    }
    let scenes = prepare_scenes(instances, cfg);
    run_prepared(instances, &scenes, cfg)
}

/// Runs the protocol on scenes from [`prepare_scenes`] (same instances, same `k`).
pub fn run_prepared(
    instances: &[DatasetInstance],
    scenes: &[(String, Result<Scene, String>)],
    cfg: &BenchConfig,
) -> Result<BenchmarkReport> {
    if instances.is_empty() {
        return Err(BenchError::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&cfg.threshold) {
        return Err(BenchError::Config(format!(
            "threshold {} is outside [0, 1]",
            cfg.threshold
        )));
    }
    let channels = cfg.layout_kinds()?;
    cfg.session_config(0)?;
    let ordered = sorted(instances);
    if scenes.len() != ordered.len()
        || scenes
            .iter()
            .zip(&ordered)
            .any(|((id, _), inst)| *id != inst.id)
    {
        return Err(BenchError::Config(
            "prepared scenes do not match the instances".into(),
        ));
    }

    let results: Vec<InstanceResult> = ordered
        .par_iter()
        .zip(scenes.par_iter())
        .enumerate()
        .map(|(index, (inst, (_, scene)))| evaluate(inst, scene, index, cfg))
        .collect::<Result<_>>()?;
    Ok(summarize(cfg, channels, results))
}

fn evaluate(
    inst: &DatasetInstance,
    scene: &Result<Scene, String>,
    index: usize,
    cfg: &BenchConfig,
) -> Result<InstanceResult> {
    let session_cfg = cfg.session_config(index)?;
    let failed = |error: String| InstanceResult {
        id: inst.id.clone(),
        noc: cfg.budget,
        reached: false,
        zero_click_miou: None,
        final_miou: 0.0,
        clicks: 0,
        curve: vec![0.0; cfg.budget],
        error: Some(error),
    };
    let scene = match scene {
        Ok(s) => s,
        Err(e) => return Ok(failed(format!("preparation failed: {e}"))),
    };
    let outcome = match cfg.segmenter {
        SegmenterChoice::Reference => {
            run_session::<f64>(scene, &inst.gt, &cfg.reference, &session_cfg)
        }
        SegmenterChoice::Oracle => run_session::<f64>(
            scene,
            &inst.gt,
            &OracleSegmenter::new(inst.gt.clone()),
            &session_cfg,
        ),
        SegmenterChoice::Empty => {
            run_session::<f64>(scene, &inst.gt, &EmptySegmenter, &session_cfg)
        }
    };
    Ok(match outcome {
        Ok(state) => {
            let curve = state.miou_curve();
            let noc = state.noc(cfg.threshold);
            let reached = state.zero_click_miou.is_some_and(|m| m >= cfg.threshold)
                || state.trace.iter().any(|r| r.miou >= cfg.threshold);
            InstanceResult {
                id: inst.id.clone(),
                noc,
                reached,
                zero_click_miou: state.zero_click_miou,
                final_miou: curve.last().copied().unwrap_or(0.0),
                clicks: state.click_budget_used(),
                curve,
                error: None,
            }
        }
        Err(abort) => failed(abort.to_string()),
    })
}

fn summarize(
    cfg: &BenchConfig,
    channels: Vec<ChannelKind>,
    instances: Vec<InstanceResult>,
) -> BenchmarkReport {
    let n = instances.len() as f64;
    let mean_noc = instances.iter().map(|r| r.noc as f64).sum::<f64>() / n;
    let curve = (0..cfg.budget)
        .map(|i| instances.iter().map(|r| r.curve[i]).sum::<f64>() / n)
        .collect();
    let zero_click_successes = instances
        .iter()
        .filter(|r| r.zero_click_miou.is_some_and(|m| m >= cfg.threshold))
        .count();
    BenchmarkReport {
        config: cfg.clone(),
        channels,
        reached: instances.iter().filter(|r| r.reached).count(),
        failures: instances.iter().filter(|r| r.error.is_some()).count(),
        zero_click_successes,
        mean_noc,
        curve,
        notes: vec![
            format!(
                "NoC counts {} for instances that never reach mIoU {}",
                cfg.budget, cfg.threshold
            ),
            "mIoU is computed per instance, then averaged".into(),
            "failed instances count as the full budget and mIoU 0".into(),
            "instances are ordered by id".into(),
        ],
        instances,
    }
}
