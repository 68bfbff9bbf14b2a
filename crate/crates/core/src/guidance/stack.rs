use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    object_guidance, scale_filtered_object, scaled_superpixel_guidance, superpixel_guidance,
    ClickSet, ScaleEstimate, TruncationMode,
};
use crate::error::{Error, Result};
use crate::geometry::Polarity;
use crate::imaging::io::encode_channel_pgm;
use crate::imaging::{
    check_same_dims, euclidean_guidance, gaussian_guidance, prev_mask_channel, BinaryMask,
    ChannelKind, GuidanceChannel, GuidanceStack, ImageBuffer,
};
use crate::proposals::ProposalSet;
use crate::scalar::Scalar;
use crate::superpixels::SuperpixelPartition;

/// Channel computation options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackConfig {
    pub gaussian_sigma: f64,
    pub truncation: TruncationMode,
    /// Compute scale-aware channels without a scale (as their scale-agnostic
    /// counterparts) instead of failing.
    pub allow_scale_fallback: bool,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            gaussian_sigma: 10.0,
            truncation: TruncationMode::Saturate,
            allow_scale_fallback: false,
        }
    }
}

/// Everything a stack is computed from. All inputs must describe the same image.
#[derive(Debug, Clone, Copy)]
pub struct GuidanceInputs<'a> {
    pub image: &'a ImageBuffer,
    pub partition: &'a SuperpixelPartition,
    pub proposals: &'a ProposalSet,
    pub clicks: &'a ClickSet,
    pub scale: Option<&'a ScaleEstimate>,
    /// Previous prediction; treated as empty when absent.
    pub prev_mask: Option<&'a BinaryMask>,
}

impl GuidanceInputs<'_> {
    fn validate(&self) -> Result<()> {
        let dims = self.image.dims();
        check_same_dims(dims, self.partition.dims())?;
        check_same_dims(dims, self.proposals.partition().dims())?;
        if let Some(m) = self.prev_mask {
            check_same_dims(dims, m.dims())?;
        }
        self.clicks.check_bounds(dims.0, dims.1)
    }
}

/// Computes the channels named in `layout`, in that order.
pub fn assemble_stack<T: Scalar>(
    inputs: &GuidanceInputs<'_>,
    layout: &[ChannelKind],
    config: &StackConfig,
) -> Result<GuidanceStack<T>> {
    inputs.validate()?;
    if inputs.scale.is_none() && !config.allow_scale_fallback {
        if let Some(k) = layout.iter().find(|k| k.is_scale_aware()) {
            return Err(Error::Configuration(format!(
                "layout requests {k} but no scale estimate is available"
            )));
        }
    }
    let (w, h) = inputs.image.dims();
    let pos = inputs.clicks.positives();
    let neg = inputs.clicks.negatives();
    let channels = layout
        .iter()
        .map(|&kind| -> Result<GuidanceChannel<T>> {
            match kind {
                ChannelKind::EuclideanPos => euclidean_guidance(&pos, Polarity::Positive, w, h),
                ChannelKind::EuclideanNeg => euclidean_guidance(&neg, Polarity::Negative, w, h),
                ChannelKind::GaussianPos => {
                    gaussian_guidance(&pos, Polarity::Positive, config.gaussian_sigma, w, h)
                }
                ChannelKind::GaussianNeg => {
                    gaussian_guidance(&neg, Polarity::Negative, config.gaussian_sigma, w, h)
                }
                ChannelKind::SpPos => {
                    superpixel_guidance(inputs.partition, &pos, Polarity::Positive)
                }
                ChannelKind::SpNeg => {
                    superpixel_guidance(inputs.partition, &neg, Polarity::Negative)
                }
                ChannelKind::Object => object_guidance(inputs.proposals, &pos),
                ChannelKind::SpPosScaled => scaled_superpixel_guidance(
                    inputs.partition,
                    &pos,
                    Polarity::Positive,
                    inputs.scale,
                    config.truncation,
                ),
                ChannelKind::SpNegScaled => scaled_superpixel_guidance(
                    inputs.partition,
                    &neg,
                    Polarity::Negative,
                    inputs.scale,
                    config.truncation,
                ),
                ChannelKind::ObjectScaled => {
                    scale_filtered_object(inputs.proposals, &pos, inputs.scale)
                }
                ChannelKind::PrevMask => match inputs.prev_mask {
                    Some(m) => prev_mask_channel(m),
                    None => prev_mask_channel(&BinaryMask::empty(w, h)?),
                },
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GuidanceStack::new(channels)
}

/// `manifest.json` written next to the channel files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackManifest {
    pub width: usize,
    pub height: usize,
    pub layout: Vec<ChannelKind>,
    pub files: Vec<String>,
    pub clicks: ClickSet,
    pub scale: Option<ScaleEstimate>,
}

/// Writes each channel as `<Kind>.pgm` plus `manifest.json` into `dir`.
pub fn save_stack<T: Scalar>(
    dir: impl AsRef<Path>,
    stack: &GuidanceStack<T>,
    clicks: &ClickSet,
    scale: Option<&ScaleEstimate>,
) -> Result<StackManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let (width, height) = stack
        .dims()
        .ok_or_else(|| Error::Configuration("cannot save an empty stack".into()))?;
    let mut files = Vec::with_capacity(stack.len());
    for ch in stack.channels() {
        let name = format!("{}.pgm", ch.kind());
        let path = dir.join(&name);
        fs::write(&path, encode_channel_pgm(ch)).map_err(|e| Error::file(&path, e))?;
        files.push(name);
    }
    let manifest = StackManifest {
        width,
        height,
        layout: stack.layout(),
        files,
        clicks: clicks.clone(),
        scale: scale.copied(),
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_vec_pretty(&manifest)?).map_err(|e| Error::file(&path, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::Pixel;
    use crate::guidance::{parse_layout, ScaleParams};
    use crate::imaging::io::decode_pgm;
    use crate::proposals::generate_proposals;

    struct Fixture {
        image: ImageBuffer,
        partition: Arc<SuperpixelPartition>,
        proposals: ProposalSet,
    }

    fn fixture() -> Fixture {
        let image = ImageBuffer::from_fn(8, 6, |p| {
            if p.x < 4 {
                [200, 40, 40]
            } else {
                [40, 40, 200]
            }
        })
        .unwrap();
        let labels: Vec<u32> = (0..48)
            .map(|i| ((i % 8) / 2 + 4 * ((i / 8) / 3)) as u32)
            .collect();
        let partition = Arc::new(SuperpixelPartition::from_labels(8, 6, labels).unwrap());
        let proposals = generate_proposals(&image, partition.clone(), 16).unwrap();
        Fixture {
            image,
            partition,
            proposals,
        }
    }

    fn inputs<'a>(
        f: &'a Fixture,
        clicks: &'a ClickSet,
        scale: Option<&'a ScaleEstimate>,
    ) -> GuidanceInputs<'a> {
        GuidanceInputs {
            image: &f.image,
            partition: &f.partition,
            proposals: &f.proposals,
            clicks,
            scale,
            prev_mask: None,
        }
    }

    #[test]
    fn euclidean_layout_matches_direct_maps() {
        let f = fixture();
        let clicks = ClickSet::from_lists(&[Pixel::new(1, 1)], &[Pixel::new(6, 4)]);
        let stack = assemble_stack::<f64>(
            &inputs(&f, &clicks, None),
            &parse_layout("euclidean").unwrap(),
            &StackConfig::default(),
        )
        .unwrap();
        let direct =
            euclidean_guidance::<f64>(&[Pixel::new(6, 4)], Polarity::Negative, 8, 6).unwrap();
        assert_eq!(stack.get(ChannelKind::EuclideanNeg).unwrap(), &direct);
        assert_eq!(
            stack.layout(),
            vec![ChannelKind::EuclideanPos, ChannelKind::EuclideanNeg]
        );
    }

    #[test]
    fn empty_clicks_use_documented_defaults() {
        let f = fixture();
        let clicks = ClickSet::new();
        let scale = ScaleEstimate::new(3.0, ScaleParams::default()).unwrap();
        let stack = assemble_stack::<f64>(
            &inputs(&f, &clicks, Some(&scale)),
            &parse_layout("full").unwrap(),
            &StackConfig::default(),
        )
        .unwrap();
        assert_eq!(stack.len(), 4);
        for kind in [
            ChannelKind::SpPosScaled,
            ChannelKind::SpNegScaled,
            ChannelKind::PrevMask,
        ] {
            assert!(stack
                .get(kind)
                .unwrap()
                .values()
                .iter()
                .all(|&v| v == 255.0));
        }
        assert!(stack
            .get(ChannelKind::ObjectScaled)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn scale_aware_layout_without_scale() {
        let f = fixture();
        let clicks = ClickSet::from_lists(&[Pixel::new(1, 1)], &[]);
        let layout = parse_layout("sp-obj-scaled").unwrap();
        let err =
            assemble_stack::<f64>(&inputs(&f, &clicks, None), &layout, &StackConfig::default());
        assert!(matches!(err, Err(Error::Configuration(_))));

        let cfg = StackConfig {
            allow_scale_fallback: true,
            ..StackConfig::default()
        };
        let stack = assemble_stack::<f64>(&inputs(&f, &clicks, None), &layout, &cfg).unwrap();
        let plain = object_guidance::<f64>(&f.proposals, &[Pixel::new(1, 1)]).unwrap();
        assert_eq!(
            stack.get(ChannelKind::ObjectScaled).unwrap().values(),
            plain.values()
        );
    }

    #[test]
    fn dimensions_follow_the_image() {
        let f = fixture();
        let clicks = ClickSet::from_lists(&[Pixel::new(2, 2)], &[Pixel::new(7, 0)]);
        let all = ChannelKind::ALL;
        let scale = ScaleEstimate::new(2.5, ScaleParams::default()).unwrap();
        let stack = assemble_stack::<f32>(
            &inputs(&f, &clicks, Some(&scale)),
            &all,
            &StackConfig::default(),
        )
        .unwrap();
        assert_eq!(stack.len(), all.len());
        assert!(stack.channels().iter().all(|c| c.dims() == (8, 6)));
    }

    #[test]
    fn mismatched_prev_mask_is_rejected() {
        let f = fixture();
        let clicks = ClickSet::new();
        let mask = BinaryMask::empty(3, 3).unwrap();
        let mut inp = inputs(&f, &clicks, None);
        inp.prev_mask = Some(&mask);
        assert!(matches!(
            assemble_stack::<f64>(&inp, &[ChannelKind::PrevMask], &StackConfig::default()),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn stack_directory_roundtrip() {
        let f = fixture();
        let clicks = ClickSet::from_lists(&[Pixel::new(2, 2)], &[Pixel::new(7, 0)]);
        let stack = assemble_stack::<f64>(
            &inputs(&f, &clicks, None),
            &parse_layout("sp-obj").unwrap(),
            &StackConfig::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_stack(dir.path(), &stack, &clicks, None).unwrap();
        assert_eq!(manifest.files, vec!["SpPos.pgm", "SpNeg.pgm", "Object.pgm"]);
        let bytes = std::fs::read(dir.path().join("SpPos.pgm")).unwrap();
        let pgm = decode_pgm(&bytes).unwrap();
        let expected: Vec<u16> = stack.channels()[0]
            .to_gray8()
            .into_iter()
            .map(u16::from)
            .collect();
        assert_eq!(pgm.data, expected);
        let back: StackManifest =
            serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(back, manifest);
    }
}
