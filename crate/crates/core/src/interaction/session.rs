use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::correction::{correction_click, max_boundary_point};
use super::sampling::{add_or_replace, random_correction_click, SamplingConfig};
use super::scale::{estimate_scale, scale_from_mask};
use super::segmenter::{SegmentationContext, Segmenter};
use super::Scene;
use crate::error::{Error, Result};
use crate::geometry::Polarity;
use crate::guidance::{
    assemble_stack, parse_layout, Click, ClickSet, ScaleEstimate, ScaleParams, StackConfig,
};
use crate::imaging::{check_same_dims, miou, BinaryMask, ChannelKind};
use crate::scalar::Scalar;

/// Click budget used during evaluation.
pub const MAX_BUDGET: usize = 20;

/// Where the session's object scale comes from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleSource {
    /// `sqrt(pi) * d` from the first positive/negative pair.
    #[default]
    Clicks,
    /// Square root of the ground-truth area.
    GroundTruth,
}

/// How the simulated user picks clicks after the first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClickPolicy {
    /// Center of the largest error region.
    #[default]
    Deterministic,
    /// Uniformly random error pixel, sometimes replacing an earlier click.
    Randomized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub budget: usize,
    pub iou_target: f64,
    pub layout: Vec<ChannelKind>,
    pub stack: StackConfig,
    pub scale_params: ScaleParams,
    pub scale_source: ScaleSource,
    /// Predict once before any click.
    pub zero_click: bool,
    /// Stop as soon as `iou_target` is reached. When false the session runs
    /// until the budget is spent or the prediction is exact.
    pub stop_at_target: bool,
    pub policy: ClickPolicy,
    pub sampling: SamplingConfig,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            budget: MAX_BUDGET,
            iou_target: 0.9,
            layout: parse_layout("full").expect("preset exists"),
            stack: StackConfig {
                allow_scale_fallback: true,
                ..StackConfig::default()
            },
            scale_params: ScaleParams::default(),
            scale_source: ScaleSource::Clicks,
            zero_click: true,
            stop_at_target: true,
            policy: ClickPolicy::Deterministic,
            sampling: SamplingConfig::default(),
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 || self.budget > MAX_BUDGET {
            return Err(Error::Configuration(format!(
                "budget must be in 1..={MAX_BUDGET}, got {}",
                self.budget
            )));
        }
        if !(0.0..=1.0).contains(&self.iou_target) {
            return Err(Error::param(format!(
                "iou_target must be in [0, 1], got {}",
                self.iou_target
            )));
        }
        if self.layout.is_empty() {
            return Err(Error::Configuration("empty layout".into()));
        }
        self.scale_params.validate()?;
        self.sampling.validate()
    }
}

/// One click and the mIoU of the prediction made after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// 1-based click number.
    pub index: usize,
    pub x: usize,
    pub y: usize,
    pub polarity: Polarity,
    pub miou: f64,
}

#[derive(Debug, Clone)]
pub struct SessionState {
    pub scene: Scene,
    pub clicks: ClickSet,
    pub scale: Option<ScaleEstimate>,
    pub prev_mask: BinaryMask,
    pub zero_click_miou: Option<f64>,
    pub trace: Vec<TraceRecord>,
    pub budget: usize,
}

impl SessionState {
    /// Clicks placed so far. Replacements in the randomized policy do not add clicks.
    pub fn click_budget_used(&self) -> usize {
        self.clicks.len()
    }

    /// Clicks needed to reach `threshold`: 0 if the zero-click prediction
    /// already does, the budget if never reached.
    pub fn noc(&self, threshold: f64) -> usize {
        if self.zero_click_miou.is_some_and(|m| m >= threshold) {
            return 0;
        }
        self.trace
            .iter()
            .find(|r| r.miou >= threshold)
            .map_or(self.budget, |r| r.index)
    }

    /// mIoU after `1..=budget` clicks, carrying the last value forward.
    pub fn miou_curve(&self) -> Vec<f64> {
        let mut last = self.zero_click_miou.unwrap_or(0.0);
        (1..=self.budget)
            .map(|i| {
                if let Some(r) = self.trace.get(i - 1) {
                    last = r.miou;
                }
                last
            })
            .collect()
    }

    /// The trace as JSON lines, one record per click.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.trace {
            let line = serde_json::to_string(r).expect("trace records serialize");
            writeln!(out, "{line}").expect("writing to a String");
        }
        out
    }

    pub fn write_trace(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.trace_jsonl()).map_err(|e| Error::file(path, e))
    }
}

/// A session that stopped on an error, with everything recorded up to it.
#[derive(Debug, thiserror::Error)]
#[error("session aborted after {} clicks: {source}", partial.trace.len())]
pub struct SessionAbort {
    pub partial: Box<SessionState>,
    #[source]
    pub source: Error,
}

fn session_scale(
    clicks: &ClickSet,
    gt: &BinaryMask,
    cfg: &SessionConfig,
) -> Result<Option<ScaleEstimate>> {
    match cfg.scale_source {
        ScaleSource::GroundTruth => scale_from_mask(gt, cfg.scale_params).map(Some),
        ScaleSource::Clicks => match clicks.first_pair() {
            Some((p, n)) => match estimate_scale(p, n, cfg.scale_params) {
                Ok(s) => Ok(Some(s)),
                Err(Error::DegenerateScale) => Ok(None),
                Err(e) => Err(e),
            },
            None => Ok(None),
        },
    }
}

fn predict<T: Scalar>(
    state: &SessionState,
    segmenter: &dyn Segmenter<T>,
    cfg: &SessionConfig,
) -> Result<BinaryMask> {
    let inputs = state
        .scene
        .inputs(&state.clicks, state.scale.as_ref(), Some(&state.prev_mask));
    let stack = assemble_stack::<T>(&inputs, &cfg.layout, &cfg.stack)?;
    let mask = segmenter.predict(&SegmentationContext {
        scene: &state.scene,
        stack: &stack,
        clicks: &state.clicks,
    })?;
    check_same_dims(state.scene.dims(), mask.dims())?;
    Ok(mask)
}

/// Runs the simulated click loop against `gt`.
///
/// The first click goes to the foreground point farthest from the object
/// boundary; later clicks follow `cfg.policy`. After every click the stack is
/// recomputed (with the previous prediction as the prev-mask input) and the
/// prediction scored. The loop ends at the budget, at an exact prediction, or
/// at the target when `stop_at_target` is set.
pub fn run_session<T: Scalar>(
    scene: &Scene,
    gt: &BinaryMask,
    segmenter: &dyn Segmenter<T>,
    cfg: &SessionConfig,
) -> std::result::Result<SessionState, SessionAbort> {
    let (w, h) = scene.dims();
    let mut state = SessionState {
        scene: scene.clone(),
        clicks: ClickSet::new(),
        scale: None,
        prev_mask: BinaryMask::empty(w, h).expect("scene has valid dimensions"),
        zero_click_miou: None,
        trace: Vec::new(),
        budget: cfg.budget.clamp(1, MAX_BUDGET),
    };
    match drive(&mut state, gt, segmenter, cfg) {
        Ok(()) => Ok(state),
        Err(source) => Err(SessionAbort {
            partial: Box::new(state),
            source,
        }),
    }
}

fn drive<T: Scalar>(
    state: &mut SessionState,
    gt: &BinaryMask,
    segmenter: &dyn Segmenter<T>,
    cfg: &SessionConfig,
) -> Result<()> {
    cfg.validate()?;
    check_same_dims(state.scene.dims(), gt.dims())?;
    let first = max_boundary_point(gt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampling.rng_seed);
    state.scale = session_scale(&state.clicks, gt, cfg)?;

    if cfg.zero_click {
        let pred = predict(state, segmenter, cfg)?;
        let m = miou(&pred, gt)?;
        state.zero_click_miou = Some(m);
        state.prev_mask = pred;
        if cfg.stop_at_target && m >= cfg.iou_target {
            return Ok(());
        }
    }

    for index in 1..=cfg.budget {
        let placed = if index == 1 {
            let c = Click::new(first, Polarity::Positive);
            state.clicks.push(first, Polarity::Positive);
            c
        } else {
            let click = match cfg.policy {
                ClickPolicy::Deterministic => correction_click(&state.prev_mask, gt)?,
                ClickPolicy::Randomized => random_correction_click(&state.prev_mask, gt, &mut rng)?,
            };
            let Some(click) = click else {
                break;
            };
            match cfg.policy {
                ClickPolicy::Deterministic => state.clicks.push(click.pixel(), click.polarity),
                ClickPolicy::Randomized => add_or_replace(
                    &mut state.clicks,
                    click,
                    cfg.sampling.replace_prob,
                    &mut rng,
                ),
            }
            click
        };
        state.scale = session_scale(&state.clicks, gt, cfg)?;
        let pred = predict(state, segmenter, cfg)?;
        let m = miou(&pred, gt)?;
        state.trace.push(TraceRecord {
            index,
            x: placed.x,
            y: placed.y,
            polarity: placed.polarity,
            miou: m,
        });
        state.prev_mask = pred;
        if cfg.stop_at_target && m >= cfg.iou_target {
            break;
        }
    }
    Ok(())
}
