//! Brute-force reference implementations and random fixtures shared by the
//! integration tests. Everything here is computed by direct summation over
//! pixels, independently of the library's per-superpixel shortcuts.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use guidemap_core::guidance::{
    object_guidance, object_raw_counts, scale_filtered_object, scale_truncate_sp,
    superpixel_guidance, superpixel_raw,
};
use guidemap_core::{
    BinaryMask, ImageBuffer, Pixel, Polarity, ProposalSet, ScaleEstimate, ScaleParams,
    SuperpixelPartition, TruncationMode,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Instance {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub partition: Arc<SuperpixelPartition>,
    pub supports: Vec<BinaryMask>,
    pub proposals: ProposalSet,
    pub positives: Vec<Pixel>,
    pub negatives: Vec<Pixel>,
    pub scale: ScaleEstimate,
}

/// Random 4-connected partition with `k` regions grown from random seeds.
pub fn random_labels<R: Rng>(rng: &mut R, w: usize, h: usize, k: usize) -> Vec<u32> {
    let n = w * h;
    let mut cells: Vec<usize> = (0..n).collect();
    cells.shuffle(rng);
    let mut labels = vec![u32::MAX; n];
    let mut frontier = Vec::new();
    for (id, &seed) in cells[..k].iter().enumerate() {
        labels[seed] = id as u32;
        frontier.push(seed);
    }
    while !frontier.is_empty() {
        let at = rng.gen_range(0..frontier.len());
        let i = frontier[at];
        let free: Vec<usize> = neighbors(i, w, h)
            .into_iter()
            .filter(|&j| labels[j] == u32::MAX)
            .collect();
        match free.choose(rng) {
            Some(&j) => {
                labels[j] = labels[i];
                frontier.push(j);
            }
            None => {
                frontier.swap_remove(at);
            }
        }
    }
    labels
}

pub fn neighbors(i: usize, w: usize, h: usize) -> Vec<usize> {
    let (x, y) = (i % w, i / w);
    let mut v = Vec::with_capacity(4);
    if x > 0 {
        v.push(i - 1);
    }
    if x + 1 < w {
        v.push(i + 1);
    }
    if y > 0 {
        v.push(i - w);
    }
    if y + 1 < h {
        v.push(i + w);
    }
    v
}

fn random_pixel<R: Rng>(rng: &mut R, w: usize, h: usize) -> Pixel {
    Pixel::new(rng.gen_range(0..w), rng.gen_range(0..h))
}

pub fn random_scale<R: Rng>(rng: &mut R) -> ScaleEstimate {
    let f1 = if rng.gen_bool(0.5) {
        0.0
    } else {
        rng.gen_range(0.0..1.0)
    };
    let f2 = if rng.gen_bool(0.2) {
        f64::INFINITY
    } else {
        f1 + rng.gen_range(0.0..3.0)
    };
    let params = ScaleParams {
        f: rng.gen_range(0.25..4.0),
        f1,
        f2,
    };
    ScaleEstimate::new(rng.gen_range(0.5..10.0), params).unwrap()
}

/// Random instance on a grid of at most `max_side` x `max_side`.
pub fn random_instance<R: Rng>(rng: &mut R, max_side: usize) -> Instance {
    let (w, h) = (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side));
    let k = rng.gen_range(1..=(w * h).min(24));
    let labels = random_labels(rng, w, h, k);
    let partition = Arc::new(SuperpixelPartition::from_labels(w, h, labels.clone()).unwrap());

    let mut seen = BTreeSet::new();
    let mut supports = Vec::new();
    for _ in 0..rng.gen_range(1..=12) {
        let mut chosen: Vec<u32> = (0..k as u32).filter(|_| rng.gen_bool(0.4)).collect();
        if chosen.is_empty() {
            chosen.push(rng.gen_range(0..k as u32));
        }
        if seen.insert(chosen.clone()) {
            let set: BTreeSet<u32> = chosen.into_iter().collect();
            supports.push(
                BinaryMask::new(w, h, labels.iter().map(|l| set.contains(l)).collect()).unwrap(),
            );
        }
    }
    let proposals = ProposalSet::from_supports(Arc::clone(&partition), &supports).unwrap();
    let positives = (0..rng.gen_range(0..=3))
        .map(|_| random_pixel(rng, w, h))
        .collect();
    let negatives = (0..rng.gen_range(0..=3))
        .map(|_| random_pixel(rng, w, h))
        .collect();
    Instance {
        width: w,
        height: h,
        labels,
        partition,
        supports,
        proposals,
        positives,
        negatives,
        scale: random_scale(rng),
    }
}

/// Centroid of label `l` by summing over the whole grid.
pub fn brute_centroid(labels: &[u32], w: usize, l: u32) -> (f64, f64) {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
    for (i, &v) in labels.iter().enumerate() {
        if v == l {
            sx += (i % w) as f64;
            sy += (i / w) as f64;
            n += 1.0;
        }
    }
    (sx / n, sy / n)
}

/// Per-pixel centroid distance to the nearest clicked superpixel; `None` without clicks.
pub fn brute_sp_raw(labels: &[u32], w: usize, clicks: &[Pixel]) -> Option<Vec<f64>> {
    if clicks.is_empty() {
        return None;
    }
    Some(
        labels
            .iter()
            .map(|&l| {
                let (px, py) = brute_centroid(labels, w, l);
                clicks
                    .iter()
                    .map(|c| {
                        let (cx, cy) = brute_centroid(labels, w, labels[c.index(w)]);
                        let (dx, dy) = (px - cx, py - cy);
                        (dx * dx + dy * dy).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect(),
    )
}

/// Per-pixel number of (positive click, proposal) pairs with both inside the
/// proposal and the proposal area accepted.
pub fn brute_object_raw(
    supports: &[BinaryMask],
    positives: &[Pixel],
    accept: impl Fn(usize) -> bool,
) -> Vec<u32> {
    let n = supports.first().map_or(0, |m| m.as_slice().len());
    (0..n)
        .map(|i| {
            let mut count = 0;
            for c in positives {
                for m in supports {
                    let area = m.as_slice().iter().filter(|&&b| b).count();
                    if accept(area) && m.get(*c) && m.as_slice()[i] {
                        count += 1;
                    }
                }
            }
            count
        })
        .collect()
}

pub fn brute_rescale(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|v| (255.0 * v / max).min(255.0)).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Compares the four guidance functions against the oracles; returns the
/// mismatches found.
pub fn check_guidance(inst: &Instance) -> Vec<String> {
    let mut bad = Vec::new();
    let (w, n) = (inst.width, inst.width * inst.height);
    let part = &inst.partition;

    for (clicks, polarity) in [
        (&inst.positives, Polarity::Positive),
        (&inst.negatives, Polarity::Negative),
    ] {
        let raw = superpixel_raw::<f64>(part, clicks)
            .unwrap()
            .map(|g| g.as_slice().to_vec());
        let oracle = brute_sp_raw(&inst.labels, w, clicks);
        if raw != oracle {
            bad.push(format!("superpixel raw {polarity}: {raw:?} vs {oracle:?}"));
        }
        let ch = superpixel_guidance::<f64>(part, clicks, polarity).unwrap();
        let expected = oracle.as_deref().map_or(vec![255.0; n], brute_rescale);
        if !close(ch.values(), &expected, 1e-9) {
            bad.push(format!("superpixel guidance {polarity}"));
        }
        if let Some(raw) = superpixel_raw::<f64>(part, clicks).unwrap() {
            let o = oracle.as_ref().unwrap();
            let limit = inst.scale.truncation();
            for (mode, f) in [
                (TruncationMode::Saturate, f64::min as fn(f64, f64) -> f64),
                (TruncationMode::LiteralMax, f64::max),
            ] {
                let got = scale_truncate_sp(&raw, Some(&inst.scale), mode, polarity).unwrap();
                let limited: Vec<f64> = o.iter().map(|&d| f(d, limit)).collect();
                if !close(got.values(), &brute_rescale(&limited), 1e-9) {
                    bad.push(format!("scale_truncate_sp {mode:?} {polarity}"));
                }
            }
        }
    }

    let raw = object_raw_counts(&inst.proposals, &inst.positives).unwrap();
    let oracle = brute_object_raw(&inst.supports, &inst.positives, |_| true);
    if raw.as_slice() != oracle.as_slice() {
        bad.push(format!("object raw: {:?} vs {oracle:?}", raw.as_slice()));
    }
    let as_f64 = |v: &[u32]| v.iter().map(|&c| c as f64).collect::<Vec<_>>();
    let ch = object_guidance::<f64>(&inst.proposals, &inst.positives).unwrap();
    if !close(ch.values(), &brute_rescale(&as_f64(&oracle)), 1e-9) {
        bad.push("object guidance".into());
    }

    let s = inst.scale;
    let filtered = brute_object_raw(&inst.supports, &inst.positives, |area| {
        let r = area as f64 / (s.s * s.s);
        s.params.f1 <= r && r <= s.params.f2
    });
    let ch = scale_filtered_object::<f64>(&inst.proposals, &inst.positives, Some(&s)).unwrap();
    if !close(ch.values(), &brute_rescale(&as_f64(&filtered)), 1e-9) {
        bad.push("scale_filtered_object".into());
    }
    bad
}

/// Independent check of a SLIC result; returns the violations found.
pub fn partition_violations(image: &ImageBuffer, part: &SuperpixelPartition) -> Vec<String> {
    let (w, h) = image.dims();
    let n = w * h;
    let mut bad = Vec::new();
    if part.dims() != (w, h) || part.labels().len() != n {
        bad.push("dimensions differ from the image".into());
        return bad;
    }
    let labels = part.labels();
    let count = part.count();
    if labels.iter().any(|&l| l as usize >= count) {
        bad.push("label outside 0..count".into());
        return bad;
    }
    let mut sizes = vec![0usize; count];
    for &l in labels {
        sizes[l as usize] += 1;
    }
    if sizes.contains(&0) {
        bad.push("unused superpixel id".into());
    }
    if part.sizes() != sizes.as_slice() {
        bad.push("recorded sizes differ from counted sizes".into());
    }
    if part.sizes().iter().sum::<usize>() != n {
        bad.push("sizes do not sum to the pixel count".into());
    }
    // Each id must be reachable from its first pixel through same-id 4-neighbours.
    let mut visited = vec![false; n];
    let mut regions = 0;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        regions += 1;
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in neighbors(i, w, h) {
                if !visited[j] && labels[j] == labels[i] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    if regions != count {
        bad.push(format!(
            "{regions} connected regions for {count} superpixels"
        ));
    }
    for l in 0..count as u32 {
        let (bx, by) = brute_centroid(labels, w, l);
        let (cx, cy) = part.centroid(l);
        if (bx - cx).abs() > 1e-9 || (by - cy).abs() > 1e-9 {
            bad.push(format!("centroid of {l}: ({cx}, {cy}) vs ({bx}, {by})"));
        }
    }
    bad
}

/// Blocky random image with per-pixel noise.
pub fn random_image<R: Rng>(rng: &mut R, w: usize, h: usize) -> ImageBuffer {
    let blocks: Vec<(usize, usize, [u8; 3])> = (0..rng.gen_range(1..6))
        .map(|_| {
            (
                rng.gen_range(0..w),
                rng.gen_range(0..h),
                [rng.gen(), rng.gen(), rng.gen()],
            )
        })
        .collect();
    let noise: Vec<i16> = (0..w * h).map(|_| rng.gen_range(-12..=12)).collect();
    ImageBuffer::from_fn(w, h, |p| {
        let (_, _, c) = blocks
            .iter()
            .min_by_key(|(x, y, _)| (x.abs_diff(p.x)).pow(2) + (y.abs_diff(p.y)).pow(2))
            .unwrap();
        let e = noise[p.index(w)];
        c.map(|v| (v as i16 + e).clamp(0, 255) as u8)
    })
    .unwrap()
}
