//! Deterministic synthetic scenes: 1-3 flat-colored shapes on a textured
//! background, with exact masks. Every fourth target is small (under 1024 px).

use std::fs;
use std::path::{Path, PathBuf};

use guidemap_core::imaging::io::{write_mask, write_png};
use guidemap_core::{BinaryMask, ImageBuffer, Pixel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::DatasetInstance;
use crate::error::{io_err, Result};

pub const SIDE: usize = 128;
/// Targets at indices divisible by this are drawn small.
pub const SMALL_EVERY: usize = 4;
const GAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disc {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Rect {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
    },
    /// Box with its top-right part cut away, leaving arms of thickness `t`.
    L {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        t: usize,
    },
}

impl Shape {
    pub fn contains(&self, p: Pixel) -> bool {
        let (x, y) = (p.x, p.y);
        match *self {
            Shape::Disc { cx, cy, r } => (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r,
            Shape::Rect { x0, y0, w, h } => x >= x0 && x < x0 + w && y >= y0 && y < y0 + h,
            Shape::L { x0, y0, w, h, t } => {
                x >= x0 && x < x0 + w && y >= y0 && y < y0 + h && (x < x0 + t || y >= y0 + h - t)
            }
        }
    }

    /// Bounding box as `(x0, y0, x1, y1)`, exclusive at the far end.
    fn bbox(&self) -> (usize, usize, usize, usize) {
        match *self {
            Shape::Disc { cx, cy, r } => (
                (cx - r).floor().max(0.0) as usize,
                (cy - r).floor().max(0.0) as usize,
                (cx + r).ceil() as usize + 1,
                (cy + r).ceil() as usize + 1,
            ),
            Shape::Rect { x0, y0, w, h } | Shape::L { x0, y0, w, h, .. } => {
                (x0, y0, x0 + w, y0 + h)
            }
        }
    }

    fn separated(&self, other: &Shape) -> bool {
        let (a0, b0, a1, b1) = self.bbox();
        let (c0, d0, c1, d1) = other.bbox();
        a1 + GAP <= c0 || c1 + GAP <= a0 || b1 + GAP <= d0 || d1 + GAP <= b0
    }

    pub fn rasterize(&self, w: usize, h: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |p| self.contains(p)).expect("non-zero size")
    }
}

/// A shape fitting in a `size` x `size` box at a random position.
fn random_shape<R: Rng>(rng: &mut R, size: usize) -> Shape {
    let x0 = rng.gen_range(2..SIDE - size - 2);
    let y0 = rng.gen_range(2..SIDE - size - 2);
    match rng.gen_range(0..3) {
        0 => {
            let r = (size as f64 - 1.0) / 2.0;
            Shape::Disc {
                cx: x0 as f64 + r,
                cy: y0 as f64 + r,
                r,
            }
        }
        1 => Shape::Rect {
            x0,
            y0,
            w: size,
            h: rng.gen_range(size * 2 / 3..=size),
        },
        _ => Shape::L {
            x0,
            y0,
            w: size,
            h: size,
            t: rng.gen_range(size / 3..=size / 2).max(4),
        },
    }
}

fn color_distance(a: [u8; 3], b: [u8; 3]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn random_color<R: Rng>(rng: &mut R, avoid: &[[u8; 3]], min_dist: f64) -> [u8; 3] {
    loop {
        let c = [
            rng.gen_range(20..236),
            rng.gen_range(20..236),
            rng.gen_range(20..236),
        ];
        if avoid.iter().all(|&a| color_distance(a, c) >= min_dist) {
            return c;
        }
    }
}

/// One generated scene. The target is the last shape placed.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub image: ImageBuffer,
    pub target: BinaryMask,
    pub others: Vec<BinaryMask>,
    pub shapes: Vec<Shape>,
}

pub fn synthetic_scene(seed: u64, index: usize) -> SyntheticScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);

    let target_size = if index.is_multiple_of(SMALL_EVERY) {
        rng.gen_range(12..=28)
    } else {
        rng.gen_range(32..=72)
    };
    let target = random_shape(&mut rng, target_size);
    let mut shapes = vec![];
    for _ in 0..rng.gen_range(0..=2) {
        for _attempt in 0..100 {
            let size = rng.gen_range(16..=48);
            let s = random_shape(&mut rng, size);
            if s.separated(&target) && shapes.iter().all(|o: &Shape| s.separated(o)) {
                shapes.push(s);
                break;
            }
        }
    }
    shapes.push(target);

    let background = random_color(&mut rng, &[], 0.0);
    let target_color = random_color(&mut rng, &[background], 140.0);
    let colors: Vec<[u8; 3]> = (0..shapes.len() - 1)
        .map(|_| random_color(&mut rng, &[background, target_color], 90.0))
        .chain(std::iter::once(target_color))
        .collect();

    let period = rng.gen_range(5..12) as f64;
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (ca, sa) = (angle.cos(), angle.sin());
    let noise: Vec<i16> = (0..SIDE * SIDE).map(|_| rng.gen_range(-8..=8)).collect();

    let image = ImageBuffer::from_fn(SIDE, SIDE, |p| {
        let e = noise[p.index(SIDE)];
        let shade = |c: [u8; 3], extra: i16| c.map(|v| (v as i16 + e + extra).clamp(0, 255) as u8);
        match shapes.iter().rposition(|s| s.contains(p)) {
            Some(i) => shade(colors[i], 0),
            None => {
                let t = (p.x as f64 * ca + p.y as f64 * sa) / period;
                let stripe = (12.0 * (t * std::f64::consts::TAU).sin()) as i16;
                shade(background, stripe)
            }
        }
    })
    .expect("fixed size");

    let masks: Vec<BinaryMask> = shapes.iter().map(|s| s.rasterize(SIDE, SIDE)).collect();
    let (target_mask, others) = masks.split_last().expect("target present");
    SyntheticScene {
        image,
        target: target_mask.clone(),
        others: others.to_vec(),
        shapes,
    }
}

pub fn instance_id(index: usize) -> String {
    format!("synth_{index:04}")
}

/// `n` instances in memory, paths relative to a would-be dataset root.
pub fn synthetic_instances(n: usize, seed: u64) -> Vec<DatasetInstance> {
    (0..n)
        .map(|i| {
            let scene = synthetic_scene(seed, i);
            let id = instance_id(i);
            DatasetInstance {
                image_path: PathBuf::from(format!("images/{id}.png")),
                mask_path: PathBuf::from(format!("masks/{id}.pgm")),
                other_paths: (0..scene.others.len())
                    .map(|j| PathBuf::from(format!("instances/{id}/{j}.pgm")))
                    .collect(),
                id,
                image: scene.image,
                gt: scene.target,
                others: scene.others,
            }
        })
        .collect()
}

/// Writes `n` instances under `out` and returns them with absolute paths.
pub fn make_synthetic_dataset(
    n: usize,
    seed: u64,
    out: impl AsRef<Path>,
) -> Result<Vec<DatasetInstance>> {
    let out = out.as_ref();
    if n == 0 {
        return Err(crate::error::BenchError::Config(
            "n must be at least 1".into(),
        ));
    }
    for sub in ["images", "masks", "instances"] {
        fs::create_dir_all(out.join(sub)).map_err(io_err(out.join(sub)))?;
    }
    let mut instances = synthetic_instances(n, seed);
    for inst in &mut instances {
        inst.image_path = out.join(&inst.image_path);
        inst.mask_path = out.join(&inst.mask_path);
        write_png(&inst.image_path, &inst.image)?;
        write_mask(&inst.mask_path, &inst.gt)?;
        if !inst.others.is_empty() {
            let dir = out.join("instances").join(&inst.id);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
        for (p, m) in inst.other_paths.iter_mut().zip(&inst.others) {
            *p = out.join(&*p);
            write_mask(&*p, m)?;
        }
    }
    Ok(instances)
}
