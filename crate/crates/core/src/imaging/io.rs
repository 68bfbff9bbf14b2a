//! PNG and binary PGM (P5) encoding for images, masks, label grids and channels.
//!
//! Masks use 0 for background and 255 for foreground. Channels are rounded to
//! 8 bits only here, at serialization time.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage};

use super::{BinaryMask, GuidanceChannel, ImageBuffer};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    ImageBuffer::new(w, h, img.into_raw())
}

pub fn read_png(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    decode_png(&bytes)
}

pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let buf = RgbImage::from_raw(
        img.width() as u32,
        img.height() as u32,
        img.as_raw().to_vec(),
    )
    .ok_or_else(|| Error::format("image", "buffer size mismatch"))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn write_png(path: impl AsRef<Path>, img: &ImageBuffer) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_png(img)?).map_err(|e| Error::file(path, e))
}

/// 8-bit grayscale PNG.
pub fn encode_gray_png(width: usize, height: usize, data: &[u8]) -> Result<Vec<u8>> {
    let buf = image::GrayImage::from_raw(width as u32, height as u32, data.to_vec())
        .ok_or_else(|| Error::format("image", "buffer size mismatch"))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn mask_to_gray(mask: &BinaryMask) -> Vec<u8> {
    mask.as_slice()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect()
}

pub fn encode_mask_png(mask: &BinaryMask) -> Result<Vec<u8>> {
    encode_gray_png(mask.width(), mask.height(), &mask_to_gray(mask))
}

pub fn encode_channel_png<T: Scalar>(channel: &GuidanceChannel<T>) -> Result<Vec<u8>> {
    encode_gray_png(channel.width(), channel.height(), &channel.to_gray8())
}

/// Decoded P5 image; samples widened to 16 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub data: Vec<u16>,
}

pub fn encode_pgm(width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn encode_pgm16(width: usize, height: usize, data: &[u16]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(2 * data.len());
    for v in data {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm> {
    let bad = |reason: &str| Error::format("pgm", reason);
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("missing P5 magic"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header field is not a number"))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(bad("header must end with whitespace"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(bad("invalid dimensions or maxval"));
    }
    let n = width * height;
    let body = &bytes[pos..];
    let data: Vec<u16> = if maxval < 256 {
        if body.len() < n {
            return Err(bad("truncated pixel data"));
        }
        body[..n].iter().map(|&v| v as u16).collect()
    } else {
        if body.len() < 2 * n {
            return Err(bad("truncated pixel data"));
        }
        body[..2 * n]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        data,
    })
}

pub fn encode_mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    encode_pgm(mask.width(), mask.height(), &mask_to_gray(mask))
}

pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_mask_pgm(mask)).map_err(|e| Error::file(path, e))
}

/// Reads a PGM or PNG mask. Every sample must be 0 or 255.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    let (width, height, samples): (usize, usize, Vec<u16>) = if bytes.starts_with(b"P5") {
        let pgm = decode_pgm(&bytes)?;
        (pgm.width, pgm.height, pgm.data)
    } else {
        let img = image::load_from_memory(&bytes)?.to_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        (w, h, img.into_raw().into_iter().map(u16::from).collect())
    };
    decode_mask_samples(width, height, &samples)
}

fn decode_mask_samples(width: usize, height: usize, samples: &[u16]) -> Result<BinaryMask> {
    let mut bits = Vec::with_capacity(samples.len());
    for &v in samples {
        match v {
            0 => bits.push(false),
            255 => bits.push(true),
            other => {
                return Err(Error::format(
                    "mask",
                    format!("non-binary sample {other} (expected 0 or 255)"),
                ))
            }
        }
    }
    BinaryMask::new(width, height, bits)
}

pub fn decode_mask_pgm(bytes: &[u8]) -> Result<BinaryMask> {
    let pgm = decode_pgm(bytes)?;
    decode_mask_samples(pgm.width, pgm.height, &pgm.data)
}

pub fn encode_channel_pgm<T: Scalar>(channel: &GuidanceChannel<T>) -> Vec<u8> {
    encode_pgm(channel.width(), channel.height(), &channel.to_gray8())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pixel;
    use crate::imaging::ChannelKind;

    #[test]
    fn pgm_header_is_exact() {
        let bytes = encode_pgm(2, 1, &[0, 255]);
        assert_eq!(bytes, b"P5\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn pgm16_roundtrip() {
        let data = vec![0u16, 1, 300, 65535, 42, 7];
        let pgm = decode_pgm(&encode_pgm16(3, 2, &data)).unwrap();
        assert_eq!((pgm.width, pgm.height, pgm.maxval), (3, 2, 65535));
        assert_eq!(pgm.data, data);
    }

    #[test]
    fn pgm_comments_are_skipped() {
        let bytes = b"P5\n# made by hand\n2 2\n# max\n255\n\x00\xff\xff\x00";
        let m = decode_mask_pgm(bytes).unwrap();
        assert!(m.get(Pixel::new(1, 0)) && !m.get(Pixel::new(0, 0)));
    }

    #[test]
    fn mask_rejects_grey_values() {
        let bytes = encode_pgm(2, 1, &[0, 128]);
        assert!(matches!(decode_mask_pgm(&bytes), Err(Error::Format { .. })));
    }

    #[test]
    fn truncated_pgm_is_rejected() {
        assert!(decode_pgm(b"P5\n4 4\n255\n\x00").is_err());
        assert!(decode_pgm(b"P6\n1 1\n255\n\x00").is_err());
    }

    #[test]
    fn png_roundtrip_preserves_pixels() {
        let img = ImageBuffer::from_fn(5, 3, |p| [p.x as u8 * 40, p.y as u8 * 70, 9]).unwrap();
        let back = decode_png(&encode_png(&img).unwrap()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn corrupt_png_is_an_error() {
        assert!(decode_png(b"definitely not a png").is_err());
    }

    #[test]
    fn channel_quantization_rounds() {
        let ch = GuidanceChannel::new(
            ChannelKind::SpPos,
            crate::imaging::Grid::from_vec(3, 1, vec![0.4f64, 127.5, 255.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(ch.to_gray8(), vec![0, 128, 255]);
    }

    #[test]
    fn mask_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let m = BinaryMask::from_fn(7, 4, |p| (p.x + p.y) % 3 == 0).unwrap();
        let path = dir.path().join("m.pgm");
        write_mask(&path, &m).unwrap();
        assert_eq!(read_mask(&path).unwrap(), m);
    }
}
