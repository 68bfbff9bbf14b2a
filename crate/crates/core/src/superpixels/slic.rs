use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SuperpixelPartition;
use crate::color::{image_to_lab, Lab};
use crate::components::{label_components, neighbors4};
use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;

/// SLIC configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicParams {
    /// Requested number of superpixels.
    pub k: usize,
    /// Weight of the spatial term relative to CIELAB color distance.
    pub compactness: f64,
    pub iterations: usize,
}

impl SlicParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }
}

impl Default for SlicParams {
    fn default() -> Self {
        Self {
            k: 1000,
            compactness: 10.0,
            iterations: 10,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Center {
    x: f64,
    y: f64,
    lab: Lab,
}

/// Simple linear iterative clustering in (CIELAB, x, y) space.
///
/// Seeds are laid out on a deterministic grid with exactly `k` cells, so the
/// result depends only on the inputs. Fragments smaller than `N / (4k)` pixels
/// are merged into their largest neighbour, and every surviving connected
/// region becomes its own superpixel.
pub fn slic(image: &ImageBuffer, params: &SlicParams) -> Result<SuperpixelPartition> {
    let (w, h) = image.dims();
    let n = w * h;
    if params.k == 0 || params.k > n {
        return Err(Error::param(format!(
            "superpixel count k={} must lie in [1, {n}]",
            params.k
        )));
    }
    if !(params.compactness > 0.0 && params.compactness.is_finite()) {
        return Err(Error::param(format!(
            "compactness must be > 0, got {}",
            params.compactness
        )));
    }
    let lab = image_to_lab(image);
    let (mut centers, mut labels, radius) = seed_grid(w, h, params.k, &lab);

    let step = (n as f64 / params.k as f64).sqrt();
    let spatial_weight = (params.compactness / step).powi(2);
    let mut best = vec![f64::INFINITY; n];

    for _ in 0..params.iterations {
        best.fill(f64::INFINITY);
        for (ci, c) in centers.iter().enumerate() {
            let x0 = (c.x - radius).floor().max(0.0) as usize;
            let x1 = ((c.x + radius).ceil() as usize).min(w - 1);
            let y0 = (c.y - radius).floor().max(0.0) as usize;
            let y1 = ((c.y + radius).ceil() as usize).min(h - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let i = y * w + x;
                    let p = &lab[i];
                    let dl = p[0] - c.lab[0];
                    let da = p[1] - c.lab[1];
                    let db = p[2] - c.lab[2];
                    let dx = x as f64 - c.x;
                    let dy = y as f64 - c.y;
                    let d = dl * dl + da * da + db * db + spatial_weight * (dx * dx + dy * dy);
                    if d < best[i] {
                        best[i] = d;
                        labels[i] = ci as u32;
                    }
                }
            }
        }

        let mut acc = vec![[0.0f64; 6]; centers.len()];
        for (i, &l) in labels.iter().enumerate() {
            let a = &mut acc[l as usize];
            a[0] += (i % w) as f64;
            a[1] += (i / w) as f64;
            a[2] += lab[i][0];
            a[3] += lab[i][1];
            a[4] += lab[i][2];
            a[5] += 1.0;
        }
        for (c, a) in centers.iter_mut().zip(&acc) {
            if a[5] > 0.0 {
                c.x = a[0] / a[5];
                c.y = a[1] / a[5];
                c.lab = [a[2] / a[5], a[3] / a[5], a[4] / a[5]];
            }
        }
    }

    let min_size = n as f64 / (4.0 * params.k as f64);
    let merged = enforce_connectivity(w, h, &labels, min_size);
    SuperpixelPartition::from_labels(w, h, merged)
}

/// Exactly `k` seeds: `rows` horizontal bands, each split into nearly equal cells.
fn seed_grid(w: usize, h: usize, k: usize, lab: &[Lab]) -> (Vec<Center>, Vec<u32>, f64) {
    let ideal = (k as f64 * h as f64 / w as f64).sqrt().round() as usize;
    let min_rows = k.div_ceil(w);
    let rows = ideal.clamp(min_rows.max(1), k.min(h));

    let mut centers = Vec::with_capacity(k);
    let mut labels = vec![0u32; w * h];
    let mut max_extent = 0usize;
    for r in 0..rows {
        let cols = k / rows + usize::from(r < k % rows);
        let (ry0, ry1) = (r * h / rows, (r + 1) * h / rows);
        max_extent = max_extent.max(ry1 - ry0);
        for j in 0..cols {
            let (cx0, cx1) = (j * w / cols, (j + 1) * w / cols);
            max_extent = max_extent.max(cx1 - cx0);
            let id = centers.len() as u32;
            for y in ry0..ry1 {
                labels[y * w + cx0..y * w + cx1].fill(id);
            }
            let (sx, sy) = ((cx0 + cx1 - 1) / 2, (ry0 + ry1 - 1) / 2);
            centers.push(Center {
                x: (cx0 + cx1 - 1) as f64 / 2.0,
                y: (ry0 + ry1 - 1) as f64 / 2.0,
                lab: lab[sy * w + sx],
            });
        }
    }
    let step = ((w * h) as f64 / k as f64).sqrt();
    (centers, labels, step.max(max_extent as f64).ceil())
}

/// Splits every label into its 4-connected regions, then folds regions smaller
/// than `min_size` into their largest adjacent region. Output ids are dense and
/// numbered in raster order.
fn enforce_connectivity(w: usize, h: usize, labels: &[u32], min_size: f64) -> Vec<u32> {
    let comps = label_components(w, h, |_| true, |a, b| labels[a] == labels[b]);
    let comp_of: Vec<usize> = comps
        .labels
        .iter()
        .map(|l| l.expect("every pixel is included") as usize)
        .collect();
    let nc = comps.count();
    let mut size = comps.sizes.clone();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nc];
    for i in 0..w * h {
        for j in neighbors4(i, w, h) {
            if comp_of[i] != comp_of[j] {
                adj[comp_of[i]].insert(comp_of[j]);
            }
        }
    }

    let mut parent: Vec<usize> = (0..nc).collect();
    fn find(parent: &mut [usize], mut c: usize) -> usize {
        while parent[c] != c {
            parent[c] = parent[parent[c]];
            c = parent[c];
        }
        c
    }

    let mut changed = true;
    while changed {
        changed = false;
        for c in 0..nc {
            if parent[c] != c || (size[c] as f64) >= min_size {
                continue;
            }
            let neighbours: BTreeSet<usize> = adj[c]
                .iter()
                .map(|&o| find(&mut parent, o))
                .filter(|&o| o != c)
                .collect();
            let Some(target) = neighbours
                .iter()
                .copied()
                .max_by(|&a, &b| size[a].cmp(&size[b]).then(b.cmp(&a)))
            else {
                continue;
            };
            parent[c] = target;
            size[target] += size[c];
            let moved = std::mem::take(&mut adj[c]);
            adj[target].extend(moved);
            changed = true;
        }
    }

    let mut remap = vec![u32::MAX; nc];
    let mut next = 0u32;
    comp_of
        .iter()
        .map(|&c| {
            let root = find(&mut parent, c);
            if remap[root] == u32::MAX {
                remap[root] = next;
                next += 1;
            }
            remap[root]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pixel;

    #[test]
    fn rejects_bad_parameters() {
        let img = ImageBuffer::filled(4, 4, [10, 20, 30]).unwrap();
        assert!(slic(&img, &SlicParams::new(0)).is_err());
        assert!(slic(&img, &SlicParams::new(17)).is_err());
        let mut p = SlicParams::new(4);
        p.compactness = 0.0;
        assert!(slic(&img, &p).is_err());
    }

    #[test]
    fn one_superpixel_per_pixel_when_k_is_n() {
        let img = ImageBuffer::from_fn(7, 5, |p| [(p.x * 30) as u8, (p.y * 50) as u8, 0]).unwrap();
        let part = slic(&img, &SlicParams::new(35)).unwrap();
        assert_eq!(part.count(), 35);
        assert!(part.sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn single_superpixel_when_k_is_one() {
        let img = ImageBuffer::from_fn(9, 6, |p| [(p.x * 20) as u8, 0, (p.y * 40) as u8]).unwrap();
        let part = slic(&img, &SlicParams::new(1)).unwrap();
        assert_eq!(part.count(), 1);
        assert_eq!(part.centroid(0), (4.0, 2.5));
    }

    #[test]
    fn uniform_image_gives_square_cells() {
        let img = ImageBuffer::filled(64, 64, [90, 120, 200]).unwrap();
        let part = slic(&img, &SlicParams::new(16)).unwrap();
        assert_eq!(part.count(), 16);
        for id in 0..16u32 {
            assert_eq!(part.size(id), 256);
        }
        // Geometry-only oracle: cells are the 16x16 tiles, centred at 7.5 + 16 i.
        for &(cx, cy) in part.centroids() {
            let nearest = |v: f64| 7.5 + 16.0 * ((v - 7.5) / 16.0).round();
            assert!((cx - nearest(cx)).abs() <= 1.0 && (cy - nearest(cy)).abs() <= 1.0);
        }
        let a = part.pixel_to_superpixel(Pixel::new(1, 1)).unwrap();
        let b = part.pixel_to_superpixel(Pixel::new(14, 14)).unwrap();
        let c = part.pixel_to_superpixel(Pixel::new(17, 1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn seed_grid_places_exactly_k() {
        let lab = vec![[0.0; 3]; 13 * 7];
        for k in 1..=91 {
            let (centers, labels, _) = seed_grid(13, 7, k, &lab);
            assert_eq!(centers.len(), k);
            let used: BTreeSet<u32> = labels.iter().copied().collect();
            assert_eq!(used.len(), k, "k={k}");
        }
    }

    #[test]
    fn connectivity_merges_small_fragments() {
        // Label 1 appears as a big block and as a stray pixel inside label 0.
        #[rustfmt::skip]
        let labels = vec![
            0, 0, 0, 1, 1, 1,
            0, 1, 0, 1, 1, 1,
            0, 0, 0, 1, 1, 1,
        ];
        let out = enforce_connectivity(6, 3, &labels, 2.0);
        assert_eq!(out[7], 0);
        assert_eq!(out.iter().filter(|&&l| l == 0).count(), 9);
        assert_eq!(out.iter().filter(|&&l| l == 1).count(), 9);
    }

    #[test]
    fn two_color_image_respects_boundary() {
        let img = ImageBuffer::from_fn(40, 40, |p| {
            if p.x < 20 {
                [220, 30, 30]
            } else {
                [30, 30, 220]
            }
        })
        .unwrap();
        let part = slic(&img, &SlicParams::new(16)).unwrap();
        for (id, members) in part.members().iter().enumerate() {
            let left = members.iter().filter(|&&i| i % 40 < 20).count();
            assert!(
                left == 0 || left == members.len(),
                "superpixel {id} straddles the color edge"
            );
        }
    }
}
