use serde::Serialize;

use super::reference::ReferenceSegmenter;
use super::scale::estimate_scale;
use super::segmenter::{SegmentationContext, Segmenter};
use super::Scene;
use crate::error::{Error, Result};
use crate::geometry::Pixel;
use crate::guidance::{
    assemble_stack, parse_layout, Click, ClickSet, ScaleEstimate, ScaleParams, StackConfig,
};
use crate::imaging::{BinaryMask, ChannelKind, GuidanceChannel};
use crate::scalar::Scalar;

/// A human-driven session: clicks arrive one at a time and can be undone.
#[derive(Debug, Clone)]
pub struct InteractiveSession<T = f64> {
    scene: Scene,
    clicks: ClickSet,
    layout: Vec<ChannelKind>,
    stack_config: StackConfig,
    scale_params: ScaleParams,
    segmenter: ReferenceSegmenter,
    /// `masks[i]` is the prediction after `i` clicks.
    masks: Vec<BinaryMask>,
    _scalar: std::marker::PhantomData<T>,
}

/// Snapshot of a session for display.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub width: usize,
    pub height: usize,
    pub superpixels: usize,
    pub proposals: usize,
    pub clicks: ClickSet,
    pub scale: Option<ScaleEstimate>,
    pub layout: Vec<ChannelKind>,
    pub foreground: usize,
}

impl<T: Scalar> InteractiveSession<T> {
    /// Uses the full scale-aware layout with the prev-mask channel.
    pub fn new(scene: Scene) -> Result<Self> {
        Self::with_config(
            scene,
            parse_layout("full")?,
            ScaleParams::default(),
            ReferenceSegmenter::default(),
        )
    }

    pub fn with_config(
        scene: Scene,
        layout: Vec<ChannelKind>,
        scale_params: ScaleParams,
        segmenter: ReferenceSegmenter,
    ) -> Result<Self> {
        scale_params.validate()?;
        segmenter.validate()?;
        let (w, h) = scene.dims();
        let mut session = Self {
            scene,
            clicks: ClickSet::new(),
            layout,
            stack_config: StackConfig {
                allow_scale_fallback: true,
                ..StackConfig::default()
            },
            scale_params,
            segmenter,
            masks: vec![BinaryMask::empty(w, h)?],
            _scalar: std::marker::PhantomData,
        };
        let first = session.predict(&BinaryMask::empty(w, h)?)?;
        session.masks = vec![first];
        Ok(session)
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn clicks(&self) -> &ClickSet {
        &self.clicks
    }

    pub fn mask(&self) -> &BinaryMask {
        self.masks
            .last()
            .expect("the zero-click mask is always present")
    }

    /// Scale from the first positive/negative pair; `None` before both exist
    /// or when they coincide.
    pub fn scale(&self) -> Option<ScaleEstimate> {
        let (p, n) = self.clicks.first_pair()?;
        estimate_scale(p, n, self.scale_params).ok()
    }

    fn predict(&self, prev: &BinaryMask) -> Result<BinaryMask> {
        let scale = self.scale();
        let inputs = self.scene.inputs(&self.clicks, scale.as_ref(), Some(prev));
        let stack = assemble_stack::<T>(&inputs, &self.layout, &self.stack_config)?;
        self.segmenter.predict(&SegmentationContext {
            scene: &self.scene,
            stack: &stack,
            clicks: &self.clicks,
        })
    }

    /// Appends a click and returns the new prediction.
    pub fn add_click(&mut self, click: Click) -> Result<&BinaryMask> {
        let (w, h) = self.scene.dims();
        click.pixel().check_bounds(w, h)?;
        self.clicks.push(click.pixel(), click.polarity);
        let prev = self.mask().clone();
        match self.predict(&prev) {
            Ok(mask) => {
                self.masks.push(mask);
                Ok(self.mask())
            }
            Err(e) => {
                self.clicks.pop();
                Err(e)
            }
        }
    }

    /// Removes the latest click and restores the mask from before it.
    pub fn undo(&mut self) -> Option<Click> {
        let click = self.clicks.pop()?;
        self.masks.pop();
        Some(click)
    }

    /// One guidance channel as it would feed the next prediction.
    pub fn channel(&self, kind: ChannelKind) -> Result<GuidanceChannel<T>> {
        let scale = self.scale();
        let inputs = self
            .scene
            .inputs(&self.clicks, scale.as_ref(), Some(self.mask()));
        let stack = assemble_stack::<T>(&inputs, &[kind], &self.stack_config)?;
        stack
            .channels()
            .first()
            .cloned()
            .ok_or_else(|| Error::Configuration(format!("channel {kind} was not produced")))
    }

    pub fn summary(&self) -> SessionSummary {
        let (width, height) = self.scene.dims();
        SessionSummary {
            width,
            height,
            superpixels: self.scene.partition().count(),
            proposals: self.scene.proposals().len(),
            clicks: self.clicks.clone(),
            scale: self.scale(),
            layout: self.layout.clone(),
            foreground: self.mask().count(),
        }
    }

    /// Whether `p` lies inside the image.
    pub fn contains(&self, p: Pixel) -> bool {
        let (w, h) = self.scene.dims();
        p.x < w && p.y < h
    }
}
