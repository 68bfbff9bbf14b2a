use serde::{Deserialize, Serialize};

use super::ScaleEstimate;
use crate::error::Result;
use crate::geometry::{Pixel, Polarity};
use crate::imaging::{rescale_to_255, ChannelKind, Grid, GuidanceChannel};
use crate::scalar::Scalar;
use crate::superpixels::SuperpixelPartition;

/// How the scale-aware superpixel map limits distances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationMode {
    /// `min(d, f*s)`: distances beyond `f*s` saturate.
    #[default]
    Saturate,
    /// `max(d, f*s)`: the formula taken literally, which raises small distances.
    LiteralMax,
}

fn sp_kind(polarity: Polarity, scaled: bool) -> ChannelKind {
    match (polarity, scaled) {
        (Polarity::Positive, false) => ChannelKind::SpPos,
        (Polarity::Negative, false) => ChannelKind::SpNeg,
        (Polarity::Positive, true) => ChannelKind::SpPosScaled,
        (Polarity::Negative, true) => ChannelKind::SpNegScaled,
    }
}

/// Per-superpixel distance from its centroid to the nearest clicked superpixel's centroid.
///
/// `None` when there are no clicks. Cost is `O(count * clicked)`.
pub fn superpixel_raw_distances<T: Scalar>(
    partition: &SuperpixelPartition,
    clicks: &[Pixel],
) -> Result<Option<Vec<T>>> {
    let mut clicked = clicks
        .iter()
        .map(|&c| partition.pixel_to_superpixel(c))
        .collect::<Result<Vec<u32>>>()?;
    if clicked.is_empty() {
        return Ok(None);
    }
    clicked.sort_unstable();
    clicked.dedup();
    let targets: Vec<(T, T)> = clicked
        .iter()
        .map(|&s| {
            let (x, y) = partition.centroid(s);
            (T::of(x), T::of(y))
        })
        .collect();
    let distances = partition
        .centroids()
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (T::of(x), T::of(y));
            targets
                .iter()
                .map(|&(tx, ty)| {
                    let (dx, dy) = (x - tx, y - ty);
                    (dx * dx + dy * dy).sqrt()
                })
                .fold(T::infinity(), T::min)
        })
        .collect();
    Ok(Some(distances))
}

/// Raw (pre-rescale) superpixel distances broadcast to every pixel.
pub fn superpixel_raw<T: Scalar>(
    partition: &SuperpixelPartition,
    clicks: &[Pixel],
) -> Result<Option<Grid<T>>> {
    let Some(per_sp) = superpixel_raw_distances::<T>(partition, clicks)? else {
        return Ok(None);
    };
    let data = partition
        .labels()
        .iter()
        .map(|&l| per_sp[l as usize])
        .collect();
    Grid::from_vec(partition.width(), partition.height(), data).map(Some)
}

/// Superpixel guidance rescaled to `[0, 255]`; all 255 without clicks.
pub fn superpixel_guidance<T: Scalar>(
    partition: &SuperpixelPartition,
    clicks: &[Pixel],
    polarity: Polarity,
) -> Result<GuidanceChannel<T>> {
    let kind = sp_kind(polarity, false);
    match superpixel_raw::<T>(partition, clicks)? {
        Some(raw) => rescale_to_255(&raw, false, kind),
        None => {
            GuidanceChannel::uniform(kind, partition.width(), partition.height(), T::max_level())
        }
    }
}

/// Applies the scale limit to raw superpixel distances, then rescales.
///
/// The limit acts on raw pixel distances, before rescaling. Without a scale
/// estimate the plain superpixel channel is returned (under the scaled kind).
pub fn scale_truncate_sp<T: Scalar>(
    raw: &Grid<T>,
    scale: Option<&ScaleEstimate>,
    mode: TruncationMode,
    polarity: Polarity,
) -> Result<GuidanceChannel<T>> {
    let kind = sp_kind(polarity, true);
    let Some(scale) = scale else {
        return rescale_to_255(raw, false, kind);
    };
    let limit = T::of(scale.truncation());
    let limited = match mode {
        TruncationMode::Saturate => raw.map(|&d| d.min(limit)),
        TruncationMode::LiteralMax => raw.map(|&d| d.max(limit)),
    };
    rescale_to_255(&limited, false, kind)
}

/// Scale-aware superpixel guidance computed from clicks; all 255 without clicks.
pub fn scaled_superpixel_guidance<T: Scalar>(
    partition: &SuperpixelPartition,
    clicks: &[Pixel],
    polarity: Polarity,
    scale: Option<&ScaleEstimate>,
    mode: TruncationMode,
) -> Result<GuidanceChannel<T>> {
    match superpixel_raw::<T>(partition, clicks)? {
        Some(raw) => scale_truncate_sp(&raw, scale, mode, polarity),
        None => GuidanceChannel::uniform(
            sp_kind(polarity, true),
            partition.width(),
            partition.height(),
            T::max_level(),
        ),
    }
}
