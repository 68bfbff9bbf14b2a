//! Structure-aware guidance maps built from clicks.
//!
//! * superpixel guidance: centroid distance from each superpixel to the nearest
//!   clicked superpixel, broadcast to its pixels;
//! * object guidance: per-pixel count of proposals that contain both the pixel
//!   and a positive click;
//! * scale-aware variants of both, driven by a [`ScaleEstimate`].

mod layout;
mod object;
mod stack;
mod superpixel;

pub use layout::{parse_layout, LAYOUT_PRESETS};
pub use object::{object_guidance, object_raw_counts, scale_filtered_object};
pub use stack::{assemble_stack, save_stack, GuidanceInputs, StackConfig, StackManifest};
pub use superpixel::{
    scale_truncate_sp, scaled_superpixel_guidance, superpixel_guidance, superpixel_raw,
    superpixel_raw_distances, TruncationMode,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pixel, Polarity};

/// A single click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Click {
    pub x: usize,
    pub y: usize,
    pub polarity: Polarity,
}

impl Click {
    pub fn new(pixel: Pixel, polarity: Polarity) -> Self {
        Self {
            x: pixel.x,
            y: pixel.y,
            polarity,
        }
    }

    pub fn pixel(&self) -> Pixel {
        Pixel::new(self.x, self.y)
    }
}

/// Positive and negative clicks in the order they were placed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClickSet {
    clicks: Vec<Click>,
}

impl ClickSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_lists(positives: &[Pixel], negatives: &[Pixel]) -> Self {
        let clicks = positives
            .iter()
            .map(|&p| Click::new(p, Polarity::Positive))
            .chain(negatives.iter().map(|&p| Click::new(p, Polarity::Negative)))
            .collect();
        Self { clicks }
    }

    pub fn push(&mut self, pixel: Pixel, polarity: Polarity) {
        self.clicks.push(Click::new(pixel, polarity));
    }

    pub fn pop(&mut self) -> Option<Click> {
        self.clicks.pop()
    }

    pub fn truncate(&mut self, len: usize) {
        self.clicks.truncate(len);
    }

    pub fn replace(&mut self, index: usize, click: Click) {
        self.clicks[index] = click;
    }

    /// Every click, in placement order.
    pub fn sequence(&self) -> &[Click] {
        &self.clicks
    }

    pub fn of(&self, polarity: Polarity) -> Vec<Pixel> {
        self.clicks
            .iter()
            .filter(|c| c.polarity == polarity)
            .map(Click::pixel)
            .collect()
    }

    pub fn positives(&self) -> Vec<Pixel> {
        self.of(Polarity::Positive)
    }

    pub fn negatives(&self) -> Vec<Pixel> {
        self.of(Polarity::Negative)
    }

    pub fn len(&self) -> usize {
        self.clicks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clicks.is_empty()
    }

    /// The first positive and first negative click, which drive scale estimation.
    pub fn first_pair(&self) -> Option<(Pixel, Pixel)> {
        let pos = self
            .clicks
            .iter()
            .find(|c| c.polarity == Polarity::Positive)?;
        let neg = self
            .clicks
            .iter()
            .find(|c| c.polarity == Polarity::Negative)?;
        Some((pos.pixel(), neg.pixel()))
    }

    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        self.clicks
            .iter()
            .try_for_each(|c| c.pixel().check_bounds(width, height))
    }
}

/// Tolerance factors applied around an object scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    /// Superpixel distances saturate at `f * s`.
    pub f: f64,
    /// Proposals need `f1 <= area / s^2`.
    pub f1: f64,
    /// Proposals need `area / s^2 <= f2`; may be infinite.
    #[serde(with = "unbounded")]
    pub f2: f64,
}

impl Default for ScaleParams {
    fn default() -> Self {
        Self {
            f: 2.0,
            f1: 0.0,
            f2: 1.5,
        }
    }
}

impl ScaleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.f > 0.0 && self.f.is_finite()) {
            return Err(Error::param(format!("f must be positive, got {}", self.f)));
        }
        if !(self.f1 >= 0.0 && self.f1.is_finite()) {
            return Err(Error::param(format!("f1 must be >= 0, got {}", self.f1)));
        }
        if self.f2.is_nan() || self.f2 < self.f1 {
            return Err(Error::param(format!(
                "f2 must be >= f1, got f1={} f2={}",
                self.f1, self.f2
            )));
        }
        Ok(())
    }
}

/// Object scale `s` in pixels together with its tolerance factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimate {
    pub s: f64,
    #[serde(flatten)]
    pub params: ScaleParams,
}

impl ScaleEstimate {
    pub fn new(s: f64, params: ScaleParams) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::param(format!("scale must be positive, got {s}")));
        }
        params.validate()?;
        Ok(Self { s, params })
    }

    /// Saturation level `f * s` for superpixel distances.
    pub fn truncation(&self) -> f64 {
        self.params.f * self.s
    }

    /// Whether a proposal of `area` pixels is consistent with the scale.
    pub fn accepts_area(&self, area: usize) -> bool {
        let ratio = area as f64 / (self.s * self.s);
        self.params.f1 <= ratio && ratio <= self.params.f2
    }
}

/// Serializes infinity as `null`, since JSON has no infinite numbers.
mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
