//! 4-connected component labeling.

use std::collections::VecDeque;

/// Component labels of a grid. `labels[i]` is `None` for excluded pixels.
#[derive(Debug, Clone)]
pub struct Components {
    pub labels: Vec<Option<u32>>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// Labels 4-connected regions of included pixels where neighbours also satisfy `same`.
///
/// Components are numbered in raster order of their first pixel.
pub fn label_components(
    width: usize,
    height: usize,
    include: impl Fn(usize) -> bool,
    same: impl Fn(usize, usize) -> bool,
) -> Components {
    let n = width * height;
    let mut labels = vec![None; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start].is_some() || !include(start) {
            continue;
        }
        let id = sizes.len() as u32;
        labels[start] = Some(id);
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            for j in neighbors4(i, width, height) {
                if labels[j].is_none() && include(j) && same(i, j) {
                    labels[j] = Some(id);
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    Components { labels, sizes }
}

/// Connected components of the `true` pixels of a boolean grid.
pub fn label_mask(bits: &[bool], width: usize, height: usize) -> Components {
    label_components(width, height, |i| bits[i], |_, _| true)
}

pub fn neighbors4(i: usize, width: usize, height: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (i % width, i / width);
    let left = (x > 0).then(|| i - 1);
    let right = (x + 1 < width).then(|| i + 1);
    let up = (y > 0).then(|| i - width);
    let down = (y + 1 < height).then(|| i + width);
    [left, right, up, down].into_iter().flatten()
}
