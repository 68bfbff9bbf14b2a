use std::sync::Arc;

use crate::color::{rgb_to_lab, Lab};
use crate::error::Result;
use crate::guidance::{ClickSet, GuidanceInputs, ScaleEstimate};
use crate::imaging::{check_same_dims, BinaryMask, ImageBuffer};
use crate::proposals::{default_max_proposals, generate_proposals, ProposalSet};
use crate::superpixels::{slic, SlicParams, SuperpixelPartition};

/// An image with its precomputed superpixels and proposals.
///
/// Cheap to clone; the heavy parts are shared.
#[derive(Debug, Clone)]
pub struct Scene {
    image: Arc<ImageBuffer>,
    partition: Arc<SuperpixelPartition>,
    proposals: Arc<ProposalSet>,
    sp_lab: Arc<Vec<Lab>>,
}

impl Scene {
    /// Runs SLIC and the proposal generator. `max_proposals` defaults to twice
    /// the superpixel count.
    pub fn prepare(
        image: ImageBuffer,
        params: &SlicParams,
        max_proposals: Option<usize>,
    ) -> Result<Self> {
        let partition = Arc::new(slic(&image, params)?);
        let max = max_proposals.unwrap_or_else(|| default_max_proposals(&partition));
        let proposals = generate_proposals(&image, Arc::clone(&partition), max)?;
        Self::from_parts(Arc::new(image), partition, Arc::new(proposals))
    }

    pub fn from_parts(
        image: Arc<ImageBuffer>,
        partition: Arc<SuperpixelPartition>,
        proposals: Arc<ProposalSet>,
    ) -> Result<Self> {
        check_same_dims(image.dims(), partition.dims())?;
        check_same_dims(image.dims(), proposals.partition().dims())?;
        let mut sums = vec![[0.0f64; 3]; partition.count()];
        for (i, rgb) in image.pixels().enumerate() {
            let lab = rgb_to_lab(rgb);
            let s = &mut sums[partition.label_at(i) as usize];
            for c in 0..3 {
                s[c] += lab[c];
            }
        }
        let sp_lab = sums
            .iter()
            .zip(partition.sizes())
            .map(|(s, &n)| {
                let n = n as f64;
                [s[0] / n, s[1] / n, s[2] / n]
            })
            .collect();
        Ok(Self {
            image,
            partition,
            proposals,
            sp_lab: Arc::new(sp_lab),
        })
    }

    pub fn image(&self) -> &ImageBuffer {
        &self.image
    }

    pub fn partition(&self) -> &SuperpixelPartition {
        &self.partition
    }

    pub fn proposals(&self) -> &ProposalSet {
        &self.proposals
    }

    pub fn dims(&self) -> (usize, usize) {
        self.image.dims()
    }

    /// Mean CIELAB color of each superpixel.
    pub fn superpixel_lab(&self) -> &[Lab] {
        &self.sp_lab
    }

    pub fn inputs<'a>(
        &'a self,
        clicks: &'a ClickSet,
        scale: Option<&'a ScaleEstimate>,
        prev_mask: Option<&'a BinaryMask>,
    ) -> GuidanceInputs<'a> {
        GuidanceInputs {
            image: &self.image,
            partition: &self.partition,
            proposals: &self.proposals,
            clicks,
            scale,
            prev_mask,
        }
    }
}
