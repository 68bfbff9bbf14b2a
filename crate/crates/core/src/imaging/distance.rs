use super::{check_dims, BinaryMask, ChannelKind, Grid, GuidanceChannel};
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Polarity};
use crate::scalar::Scalar;

/// Exact squared Euclidean distance from every pixel to the nearest pixel of `set`.
///
/// Two passes of the lower-envelope-of-parabolas transform (Felzenszwalb and
/// Huttenlocher). Pixels get `f64::INFINITY` when `set` is empty.
pub fn squared_distance_transform(set: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(set.len(), width * height, "set length must match grid");
    let mut out: Vec<f64> = set
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();

    let n = width.max(height);
    let mut scratch = Envelope::with_capacity(n);
    let mut line = vec![0.0; n];
    let mut result = vec![0.0; n];

    for x in 0..width {
        for y in 0..height {
            line[y] = out[y * width + x];
        }
        scratch.transform(&line[..height], &mut result[..height]);
        for y in 0..height {
            out[y * width + x] = result[y];
        }
    }
    for y in 0..height {
        let row = &mut out[y * width..(y + 1) * width];
        line[..width].copy_from_slice(row);
        scratch.transform(&line[..width], &mut result[..width]);
        row.copy_from_slice(&result[..width]);
    }
    out
}

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            sites: Vec::with_capacity(n),
            bounds: Vec::with_capacity(n + 1),
        }
    }

    /// 1-D squared distance transform of the sampled function `f`.
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.sites.clear();
        self.bounds.clear();
        for (q, &fq) in f.iter().enumerate() {
            if !fq.is_finite() {
                continue;
            }
            loop {
                let Some(&v) = self.sites.last() else {
                    self.sites.push(q);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let s = ((fq + (q * q) as f64) - (f[v] + (v * v) as f64)) / (2.0 * (q - v) as f64);
                if s <= *self.bounds.last().unwrap() {
                    self.sites.pop();
                    self.bounds.pop();
                } else {
                    self.sites.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }
        if self.sites.is_empty() {
            out.fill(f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while k + 1 < self.sites.len() && self.bounds[k + 1] < q as f64 {
                k += 1;
            }
            let v = self.sites[k];
            let d = q.abs_diff(v) as f64;
            *o = d * d + f[v];
        }
    }
}

fn min_click_distance_sq(p: Pixel, clicks: &[Pixel]) -> Option<u64> {
    clicks.iter().map(|c| p.distance_sq(*c)).min()
}

fn check_clicks(clicks: &[Pixel], width: usize, height: usize) -> Result<()> {
    check_dims(width, height)?;
    clicks
        .iter()
        .try_for_each(|c| c.check_bounds(width, height))
}

/// Euclidean distance to the nearest click, saturated at 255.
///
/// With no clicks every pixel is 255.
pub fn euclidean_guidance<T: Scalar>(
    clicks: &[Pixel],
    polarity: Polarity,
    width: usize,
    height: usize,
) -> Result<GuidanceChannel<T>> {
    check_clicks(clicks, width, height)?;
    let kind = match polarity {
        Polarity::Positive => ChannelKind::EuclideanPos,
        Polarity::Negative => ChannelKind::EuclideanNeg,
    };
    let top = T::max_level();
    let grid = Grid::from_fn(width, height, |p| match min_click_distance_sq(p, clicks) {
        Some(d2) => T::of(d2 as f64).sqrt().min(top),
        None => top,
    })?;
    GuidanceChannel::new(kind, grid)
}

/// `255 * exp(-d^2 / (2 sigma^2))` for the nearest click; zero with no clicks.
///
/// Responses are combined with max, so the closest click dominates.
pub fn gaussian_guidance<T: Scalar>(
    clicks: &[Pixel],
    polarity: Polarity,
    sigma: f64,
    width: usize,
    height: usize,
) -> Result<GuidanceChannel<T>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!(
            "gaussian sigma must be > 0, got {sigma}"
        )));
    }
    check_clicks(clicks, width, height)?;
    let kind = match polarity {
        Polarity::Positive => ChannelKind::GaussianPos,
        Polarity::Negative => ChannelKind::GaussianNeg,
    };
    let top = T::max_level();
    let denom = T::of(2.0 * sigma * sigma);
    let grid = Grid::from_fn(width, height, |p| match min_click_distance_sq(p, clicks) {
        Some(d2) => top * (-T::of(d2 as f64) / denom).exp(),
        None => T::zero(),
    })?;
    GuidanceChannel::new(kind, grid)
}

/// Distance transform of the previous prediction's foreground, saturated at 255.
pub fn prev_mask_channel<T: Scalar>(mask: &BinaryMask) -> Result<GuidanceChannel<T>> {
    let (w, h) = mask.dims();
    let d2 = squared_distance_transform(mask.as_slice(), w, h);
    let top = T::max_level();
    let grid = Grid::from_vec(
        w,
        h,
        d2.into_iter()
            .map(|v| {
                if v.is_finite() {
                    T::of(v).sqrt().min(top)
                } else {
                    top
                }
            })
            .collect(),
    )?;
    GuidanceChannel::new(ChannelKind::PrevMask, grid)
}
