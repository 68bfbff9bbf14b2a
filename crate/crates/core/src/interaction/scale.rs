use crate::error::{Error, Result};
use crate::geometry::Pixel;
use crate::guidance::{ScaleEstimate, ScaleParams};
use crate::imaging::BinaryMask;

/// Object scale from the first positive/negative click pair: `sqrt(pi) * d`.
pub fn estimate_scale(
    first_pos: Pixel,
    first_neg: Pixel,
    params: ScaleParams,
) -> Result<ScaleEstimate> {
    let d = first_pos.distance(first_neg);
    if d == 0.0 {
        return Err(Error::DegenerateScale);
    }
    ScaleEstimate::new(std::f64::consts::PI.sqrt() * d, params)
}

/// Ground-truth scale: square root of the foreground pixel count.
pub fn scale_from_mask(gt: &BinaryMask, params: ScaleParams) -> Result<ScaleEstimate> {
    let n = gt.count();
    if n == 0 {
        return Err(Error::EmptyObject);
    }
    ScaleEstimate::new((n as f64).sqrt(), params)
}
