use serde::{Deserialize, Serialize};

use super::segmenter::{SegmentationContext, Segmenter};
use crate::color::lab_distance;
use crate::error::{Error, Result};
use crate::geometry::Polarity;
use crate::imaging::{BinaryMask, ChannelKind, GuidanceStack};
use crate::scalar::Scalar;

/// Classical per-superpixel scorer driven by the guidance stack.
///
/// score = w_dist * (neg - pos) / 255 + w_obj * obj / 255 + w_color * (sim_pos - sim_neg)
///
/// `pos`/`neg` are superpixel means of the first available distance channel of
/// each polarity, `obj` of the object channel (0 if absent), and `sim` is
/// `max(0, 1 - dE / color_sigma)` to the most similar clicked superpixel of
/// that polarity in mean CIELAB (0 without such clicks). The kernel reaches
/// exactly zero so unrelated colors add no evidence. Clicked superpixels take the
/// polarity of their latest click; the rest are foreground iff score > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSegmenter {
    pub w_dist: f64,
    pub w_obj: f64,
    pub w_color: f64,
    pub color_sigma: f64,
}

impl Default for ReferenceSegmenter {
    fn default() -> Self {
        Self {
            w_dist: 1.0,
            w_obj: 1.0,
            w_color: 1.0,
            color_sigma: 20.0,
        }
    }
}

const POS_CHANNELS: [ChannelKind; 3] = [
    ChannelKind::SpPosScaled,
    ChannelKind::SpPos,
    ChannelKind::EuclideanPos,
];
const NEG_CHANNELS: [ChannelKind; 3] = [
    ChannelKind::SpNegScaled,
    ChannelKind::SpNeg,
    ChannelKind::EuclideanNeg,
];

/// Per-superpixel mean of a distance-like channel; Gaussian responses are flipped.
fn distance_means<T: Scalar>(
    stack: &GuidanceStack<T>,
    candidates: &[ChannelKind],
    gaussian: ChannelKind,
    labels: &[u32],
    sizes: &[usize],
) -> Option<Vec<f64>> {
    if let Some(ch) = candidates.iter().find_map(|&k| stack.get(k)) {
        return Some(superpixel_means(ch.values(), labels, sizes, |v| v));
    }
    let ch = stack.get(gaussian)?;
    Some(superpixel_means(ch.values(), labels, sizes, |v| 255.0 - v))
}

fn superpixel_means<T: Scalar>(
    values: &[T],
    labels: &[u32],
    sizes: &[usize],
    f: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let mut sums = vec![0.0; sizes.len()];
    for (&v, &l) in values.iter().zip(labels) {
        sums[l as usize] += f(v.as_f64());
    }
    sums.iter().zip(sizes).map(|(s, &n)| s / n as f64).collect()
}

impl ReferenceSegmenter {
    pub fn validate(&self) -> Result<()> {
        let all = [self.w_dist, self.w_obj, self.w_color, self.color_sigma];
        if all.iter().any(|v| !v.is_finite()) || self.color_sigma <= 0.0 {
            return Err(Error::param(
                "reference weights must be finite and color_sigma positive",
            ));
        }
        Ok(())
    }

    /// Per-superpixel scores before the clicked superpixels are forced.
    pub fn scores<T: Scalar>(&self, ctx: &SegmentationContext<'_, T>) -> Result<Vec<f64>> {
        self.validate()?;
        let partition = ctx.scene.partition();
        if ctx.stack.dims() != Some(partition.dims()) {
            return Err(Error::ShapeMismatch {
                expected: partition.dims(),
                found: ctx.stack.dims().unwrap_or((0, 0)),
            });
        }
        let (labels, sizes) = (partition.labels(), partition.sizes());
        let missing = |what| {
            Error::Configuration(format!(
                "reference segmenter needs a {what} distance channel"
            ))
        };
        let pos = distance_means(
            ctx.stack,
            &POS_CHANNELS,
            ChannelKind::GaussianPos,
            labels,
            sizes,
        )
        .ok_or_else(|| missing("positive"))?;
        let neg = distance_means(
            ctx.stack,
            &NEG_CHANNELS,
            ChannelKind::GaussianNeg,
            labels,
            sizes,
        )
        .ok_or_else(|| missing("negative"))?;
        let obj = [ChannelKind::ObjectScaled, ChannelKind::Object]
            .iter()
            .find_map(|&k| ctx.stack.get(k))
            .map(|ch| superpixel_means(ch.values(), labels, sizes, |v| v));

        let lab = ctx.scene.superpixel_lab();
        let clicked = |polarity| -> Result<Vec<u32>> {
            let mut v = ctx
                .clicks
                .of(polarity)
                .into_iter()
                .map(|p| partition.pixel_to_superpixel(p))
                .collect::<Result<Vec<_>>>()?;
            v.sort_unstable();
            v.dedup();
            Ok(v)
        };
        let (pos_sp, neg_sp) = (clicked(Polarity::Positive)?, clicked(Polarity::Negative)?);
        let sim = |sp: usize, set: &[u32]| {
            set.iter()
                .map(|&c| {
                    (1.0 - lab_distance(&lab[sp], &lab[c as usize]) / self.color_sigma).max(0.0)
                })
                .fold(0.0, f64::max)
        };

        Ok((0..partition.count())
            .map(|sp| {
                let o = obj.as_ref().map_or(0.0, |o| o[sp]);
                self.w_dist * (neg[sp] - pos[sp]) / 255.0
                    + self.w_obj * o / 255.0
                    + self.w_color * (sim(sp, &pos_sp) - sim(sp, &neg_sp))
            })
            .collect())
    }
}

impl<T: Scalar> Segmenter<T> for ReferenceSegmenter {
    fn predict(&self, ctx: &SegmentationContext<'_, T>) -> Result<BinaryMask> {
        let partition = ctx.scene.partition();
        let mut fg: Vec<bool> = self.scores(ctx)?.into_iter().map(|s| s > 0.0).collect();
        for c in ctx.clicks.sequence() {
            fg[partition.pixel_to_superpixel(c.pixel())? as usize] =
                c.polarity == Polarity::Positive;
        }
        let (w, h) = partition.dims();
        BinaryMask::new(
            w,
            h,
            partition.labels().iter().map(|&l| fg[l as usize]).collect(),
        )
    }
}
