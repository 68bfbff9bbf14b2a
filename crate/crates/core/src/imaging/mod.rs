//! Dense image, mask and scalar-grid primitives.

mod channel;
mod distance;
pub mod io;
mod metrics;

pub use channel::{rescale_to_255, ChannelKind, GuidanceChannel, GuidanceStack};
pub use distance::{
    euclidean_guidance, gaussian_guidance, prev_mask_channel, squared_distance_transform,
};
pub use metrics::miou;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pixel;

/// Row-major grid of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![value; width * height],
        })
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::param(format!(
                "grid data has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Pixel) -> T) -> Result<Self> {
        check_dims(width, height)?;
        let data = (0..width * height)
            .map(|i| f(Pixel::from_index(i, width)))
            .collect();
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, p: Pixel) -> Option<&T> {
        (p.x < self.width && p.y < self.height).then(|| &self.data[p.index(self.width)])
    }

    pub fn at(&self, x: usize, y: usize) -> &T {
        &self.data[y * self.width + x]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }
}

pub(crate) fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::param(format!(
            "grid dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

pub(crate) fn check_same_dims(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch { expected, found });
    }
    Ok(())
}

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, rgb: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if rgb.len() != 3 * width * height {
            return Err(Error::param(format!(
                "rgb buffer has {} bytes, expected 3*{}*{}",
                rgb.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, rgb })
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let rgb = color.repeat(width * height);
        Ok(Self { width, height, rgb })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(Pixel) -> [u8; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut rgb = Vec::with_capacity(3 * width * height);
        for i in 0..width * height {
            rgb.extend_from_slice(&f(Pixel::from_index(i, width)));
        }
        Ok(Self { width, height, rgb })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.rgb
    }

    pub fn pixel(&self, p: Pixel) -> [u8; 3] {
        let i = 3 * p.index(self.width);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn put_pixel(&mut self, p: Pixel, color: [u8; 3]) {
        let i = 3 * p.index(self.width);
        self.rgb[i..i + 3].copy_from_slice(&color);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.rgb.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// Per-pixel boolean mask (true = foreground).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        if bits.len() != width * height {
            return Err(Error::param(format!(
                "mask has {} entries, expected {}x{}",
                bits.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn full(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Pixel) -> bool) -> Result<Self> {
        check_dims(width, height)?;
        let bits = (0..width * height)
            .map(|i| f(Pixel::from_index(i, width)))
            .collect();
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, p: Pixel) -> bool {
        self.bits[p.index(self.width)]
    }

    pub fn set(&mut self, p: Pixel, value: bool) {
        let w = self.width;
        self.bits[p.index(w)] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn foreground(&self) -> impl Iterator<Item = Pixel> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Pixel::from_index(i, w))
    }

    pub fn invert(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Pixelwise `self && !other`.
    pub fn minus(&self, other: &BinaryMask) -> Result<BinaryMask> {
        check_same_dims(self.dims(), other.dims())?;
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a && !b)
                .collect(),
        })
    }

    pub fn xor(&self, other: &BinaryMask) -> Result<BinaryMask> {
        check_same_dims(self.dims(), other.dims())?;
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a != b)
                .collect(),
        })
    }
}
