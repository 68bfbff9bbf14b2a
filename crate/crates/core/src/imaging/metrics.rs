use super::{check_same_dims, BinaryMask};
use crate::error::Result;

/// Intersection over union of two masks.
///
/// Two empty masks score 1.0: an empty prediction of an empty region is correct.
pub fn miou(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    check_same_dims(gt.dims(), pred.dims())?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&a, &b) in pred.as_slice().iter().zip(gt.as_slice()) {
        inter += (a && b) as usize;
        union += (a || b) as usize;
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}
