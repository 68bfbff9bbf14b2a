use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_same_dims, Grid};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Identifies what a guidance channel encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelKind {
    EuclideanPos,
    EuclideanNeg,
    GaussianPos,
    GaussianNeg,
    SpPos,
    SpNeg,
    Object,
    SpPosScaled,
    SpNegScaled,
    ObjectScaled,
    PrevMask,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 11] = [
        ChannelKind::EuclideanPos,
        ChannelKind::EuclideanNeg,
        ChannelKind::GaussianPos,
        ChannelKind::GaussianNeg,
        ChannelKind::SpPos,
        ChannelKind::SpNeg,
        ChannelKind::Object,
        ChannelKind::SpPosScaled,
        ChannelKind::SpNegScaled,
        ChannelKind::ObjectScaled,
        ChannelKind::PrevMask,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::EuclideanPos => "EuclideanPos",
            ChannelKind::EuclideanNeg => "EuclideanNeg",
            ChannelKind::GaussianPos => "GaussianPos",
            ChannelKind::GaussianNeg => "GaussianNeg",
            ChannelKind::SpPos => "SpPos",
            ChannelKind::SpNeg => "SpNeg",
            ChannelKind::Object => "Object",
            ChannelKind::SpPosScaled => "SpPosScaled",
            ChannelKind::SpNegScaled => "SpNegScaled",
            ChannelKind::ObjectScaled => "ObjectScaled",
            ChannelKind::PrevMask => "PrevMask",
        }
    }

    /// Channels that need a scale estimate to be computed as intended.
    pub fn is_scale_aware(self) -> bool {
        matches!(
            self,
            ChannelKind::SpPosScaled | ChannelKind::SpNegScaled | ChannelKind::ObjectScaled
        )
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    /// Accepts `SpPos`, `sp_pos`, `sp-pos` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .flat_map(char::to_lowercase)
            .collect();
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == norm)
            .ok_or_else(|| Error::param(format!("unknown channel kind '{s}'")))
    }
}

/// One guidance map with values in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceChannel<T> {
    kind: ChannelKind,
    values: Grid<T>,
}

impl<T: Scalar> GuidanceChannel<T> {
    pub fn new(kind: ChannelKind, values: Grid<T>) -> Result<Self> {
        let top = T::max_level();
        if let Some(bad) = values
            .as_slice()
            .iter()
            .find(|v| !(**v >= T::zero() && **v <= top))
        {
            return Err(Error::NumericDomain(format!(
                "{kind} channel value {bad} outside [0, 255]"
            )));
        }
        Ok(Self { kind, values })
    }

    pub fn uniform(kind: ChannelKind, width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(kind, Grid::filled(width, height, value)?)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ChannelKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.values
    }

    pub fn values(&self) -> &[T] {
        self.values.as_slice()
    }

    pub fn width(&self) -> usize {
        self.values.width()
    }

    pub fn height(&self) -> usize {
        self.values.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    pub fn at(&self, x: usize, y: usize) -> T {
        *self.values.at(x, y)
    }

    /// Rounds to 8-bit for serialization.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.values
            .as_slice()
            .iter()
            .map(|v| v.as_f64().round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Linear map of non-negative raw values onto `[0, 255]`, with `max(raw)` landing on 255.
///
/// An all-zero input maps to all zeros. With `invert`, the result is `255 - v`.
pub fn rescale_to_255<T: Scalar>(
    raw: &Grid<T>,
    invert: bool,
    kind: ChannelKind,
) -> Result<GuidanceChannel<T>> {
    let mut max = T::zero();
    for &v in raw.as_slice() {
        if v.is_nan() || v.is_infinite() || v < T::zero() {
            return Err(Error::NumericDomain(format!(
                "rescale input must be finite and non-negative, got {v}"
            )));
        }
        if v > max {
            max = v;
        }
    }
    let top = T::max_level();
    let scaled = raw.map(|&v| {
        let s = if max == T::zero() {
            T::zero()
        } else {
            (top * v / max).min(top)
        };
        if invert {
            top - s
        } else {
            s
        }
    });
    GuidanceChannel::new(kind, scaled)
}

/// Ordered set of guidance channels sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceStack<T> {
    channels: Vec<GuidanceChannel<T>>,
}

impl<T: Scalar> GuidanceStack<T> {
    pub fn new(channels: Vec<GuidanceChannel<T>>) -> Result<Self> {
        if let Some(first) = channels.first() {
            for (i, c) in channels.iter().enumerate() {
                check_same_dims(first.dims(), c.dims())?;
                if channels[..i].iter().any(|o| o.kind() == c.kind()) {
                    return Err(Error::Configuration(format!(
                        "duplicate channel kind {} in stack",
                        c.kind()
                    )));
                }
            }
        }
        Ok(Self { channels })
    }

    pub fn layout(&self) -> Vec<ChannelKind> {
        self.channels.iter().map(|c| c.kind()).collect()
    }

    pub fn channels(&self) -> &[GuidanceChannel<T>] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn get(&self, kind: ChannelKind) -> Option<&GuidanceChannel<T>> {
        self.channels.iter().find(|c| c.kind() == kind)
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.channels.first().map(|c| c.dims())
    }
}
