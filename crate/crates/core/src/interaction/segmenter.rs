use super::Scene;
use crate::error::Result;
use crate::guidance::ClickSet;
use crate::imaging::{BinaryMask, GuidanceStack};
use crate::scalar::Scalar;

/// What a segmenter sees for one prediction.
#[derive(Debug, Clone, Copy)]
pub struct SegmentationContext<'a, T> {
    pub scene: &'a Scene,
    pub stack: &'a GuidanceStack<T>,
    pub clicks: &'a ClickSet,
}

/// Maps an image and its guidance stack to a mask of the same size.
///
/// Implementations must be deterministic for fixed inputs.
pub trait Segmenter<T: Scalar>: Send + Sync {
    fn predict(&self, ctx: &SegmentationContext<'_, T>) -> Result<BinaryMask>;
}

/// Always answers with the ground truth.
#[derive(Debug, Clone)]
pub struct OracleSegmenter {
    gt: BinaryMask,
}

impl OracleSegmenter {
    pub fn new(gt: BinaryMask) -> Self {
        Self { gt }
    }
}

impl<T: Scalar> Segmenter<T> for OracleSegmenter {
    fn predict(&self, _: &SegmentationContext<'_, T>) -> Result<BinaryMask> {
        Ok(self.gt.clone())
    }
}

/// Always predicts background.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmptySegmenter;

impl<T: Scalar> Segmenter<T> for EmptySegmenter {
    fn predict(&self, ctx: &SegmentationContext<'_, T>) -> Result<BinaryMask> {
        let (w, h) = ctx.scene.dims();
        BinaryMask::empty(w, h)
    }
}
