use crate::components::{label_mask, neighbors4};
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Polarity};
use crate::guidance::Click;
use crate::imaging::{check_same_dims, squared_distance_transform, BinaryMask};

/// Foreground pixels with a 4-neighbour that is background or off the grid.
pub fn boundary_pixels(mask: &BinaryMask) -> Vec<bool> {
    let (w, h) = mask.dims();
    let bits = mask.as_slice();
    (0..w * h)
        .map(|i| {
            if !bits[i] {
                return false;
            }
            let (x, y) = (i % w, i / w);
            let on_edge = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            on_edge || neighbors4(i, w, h).any(|j| !bits[j])
        })
        .collect()
}

/// Distance from each foreground pixel to the nearest boundary pixel.
/// Background pixels get 0.
pub fn interior_distance(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = mask.dims();
    let d2 = squared_distance_transform(&boundary_pixels(mask), w, h);
    d2.into_iter()
        .zip(mask.as_slice())
        .map(|(d, &fg)| if fg { d.sqrt() } else { 0.0 })
        .collect()
}

/// Distance from each pixel to the nearest foreground pixel (infinite if there is none).
pub fn exterior_distance(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = mask.dims();
    squared_distance_transform(mask.as_slice(), w, h)
        .into_iter()
        .map(f64::sqrt)
        .collect()
}

/// The foreground pixel farthest from the object boundary (first in raster order on ties).
pub fn max_boundary_point(gt: &BinaryMask) -> Result<Pixel> {
    let dist = interior_distance(gt);
    let mut best: Option<(usize, f64)> = None;
    for (i, (&d, &fg)) in dist.iter().zip(gt.as_slice()).enumerate() {
        if fg && best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| Pixel::from_index(i, gt.width()))
        .ok_or(Error::EmptyObject)
}

/// Click at the pixel nearest the centroid of the largest error region.
///
/// False negatives (`gt && !pred`) and false positives (`pred && !gt`) are
/// labeled separately, so each region has a single error type; it decides the
/// polarity. Returns `None` when the prediction is already exact.
pub fn correction_click(pred: &BinaryMask, gt: &BinaryMask) -> Result<Option<Click>> {
    check_same_dims(gt.dims(), pred.dims())?;
    let (w, h) = gt.dims();
    let false_neg = gt.minus(pred)?;
    let false_pos = pred.minus(gt)?;

    let mut best: Option<(usize, Polarity, Vec<usize>)> = None;
    for (mask, polarity) in [
        (&false_neg, Polarity::Positive),
        (&false_pos, Polarity::Negative),
    ] {
        let comps = label_mask(mask.as_slice(), w, h);
        let Some((id, &size)) = comps
            .sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        else {
            continue;
        };
        if best.as_ref().is_none_or(|(s, _, _)| size > *s) {
            let members = comps
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == Some(id as u32))
                .map(|(i, _)| i)
                .collect();
            best = Some((size, polarity, members));
        }
    }
    let Some((size, polarity, members)) = best else {
        return Ok(None);
    };

    let n = size as f64;
    let cx = members.iter().map(|&i| (i % w) as f64).sum::<f64>() / n;
    let cy = members.iter().map(|&i| (i / w) as f64).sum::<f64>() / n;
    let nearest = members
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let da = ((a % w) as f64 - cx).powi(2) + ((a / w) as f64 - cy).powi(2);
            let db = ((b % w) as f64 - cx).powi(2) + ((b / w) as f64 - cy).powi(2);
            da.total_cmp(&db).then(a.cmp(&b))
        })
        .expect("component is non-empty");
    Ok(Some(Click::new(Pixel::from_index(nearest, w), polarity)))
}
