//! Superpixel partitions and the SLIC partitioner.

mod slic;

pub use slic::{slic, SlicParams};

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::components::{label_components, neighbors4};
use crate::error::{Error, Result};
use crate::geometry::Pixel;
use crate::imaging::check_dims;
use crate::imaging::io::{decode_pgm, encode_pgm16};

/// A complete partition of the image grid into 4-connected superpixels.
///
/// Ids are dense in `[0, count)`. Centroids are `(sum x / |s|, sum y / |s|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpixelPartition {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    centroids: Vec<(f64, f64)>,
    sizes: Vec<usize>,
    adjacency: Vec<Vec<u32>>,
}

impl SuperpixelPartition {
    /// Builds a partition from a label grid, rejecting gaps in the id range and
    /// superpixels that are not 4-connected.
    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        check_dims(width, height)?;
        if labels.len() != width * height {
            return Err(Error::param(format!(
                "label grid has {} entries, expected {}",
                labels.len(),
                width * height
            )));
        }
        let count = labels.iter().max().map_or(0, |&m| m as usize + 1);
        let mut sizes = vec![0usize; count];
        let mut sum_x = vec![0u64; count];
        let mut sum_y = vec![0u64; count];
        for (i, &l) in labels.iter().enumerate() {
            let l = l as usize;
            sizes[l] += 1;
            sum_x[l] += (i % width) as u64;
            sum_y[l] += (i / width) as u64;
        }
        if let Some(gap) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::param(format!("superpixel id {gap} is unused")));
        }
        let comps = label_components(width, height, |_| true, |a, b| labels[a] == labels[b]);
        if comps.count() != count {
            return Err(Error::param(format!(
                "label grid has {} connected regions for {count} ids; superpixels must be 4-connected",
                comps.count()
            )));
        }
        let centroids = (0..count)
            .map(|l| {
                let n = sizes[l] as f64;
                (sum_x[l] as f64 / n, sum_y[l] as f64 / n)
            })
            .collect();
        let mut adj = vec![BTreeSet::new(); count];
        for i in 0..labels.len() {
            for j in neighbors4(i, width, height) {
                if labels[i] != labels[j] {
                    adj[labels[i] as usize].insert(labels[j]);
                }
            }
        }
        Ok(Self {
            width,
            height,
            labels,
            centroids,
            sizes,
            adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// One superpixel per pixel.
    pub fn singletons(width: usize, height: usize) -> Result<Self> {
        Self::from_labels(width, height, (0..(width * height) as u32).collect())
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

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn centroids(&self) -> &[(f64, f64)] {
        &self.centroids
    }

    pub fn centroid(&self, id: u32) -> (f64, f64) {
        self.centroids[id as usize]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, id: u32) -> usize {
        self.sizes[id as usize]
    }

    /// Sorted neighbour ids of a superpixel.
    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.adjacency[id as usize]
    }

    /// The superpixel containing `p`.
    pub fn pixel_to_superpixel(&self, p: Pixel) -> Result<u32> {
        p.check_bounds(self.width, self.height)?;
        Ok(self.labels[p.index(self.width)])
    }

    pub fn label_at(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Pixel indices of every superpixel, in raster order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    pub fn sidecar(&self) -> PartitionSidecar {
        PartitionSidecar {
            width: self.width,
            height: self.height,
            count: self.count(),
            centroids: self.centroids.clone(),
            sizes: self.sizes.clone(),
        }
    }

    /// 16-bit PGM label grid.
    pub fn to_pgm16(&self) -> Result<Vec<u8>> {
        if self.count() > u16::MAX as usize + 1 {
            return Err(Error::param(format!(
                "{} superpixels do not fit a 16-bit label grid",
                self.count()
            )));
        }
        let data: Vec<u16> = self.labels.iter().map(|&l| l as u16).collect();
        Ok(encode_pgm16(self.width, self.height, &data))
    }

    /// Writes `<stem>.pgm` and `<stem>.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        let pgm = dir.join(format!("{stem}.pgm"));
        fs::write(&pgm, self.to_pgm16()?).map_err(|e| Error::file(&pgm, e))?;
        let json = dir.join(format!("{stem}.json"));
        fs::write(&json, serde_json::to_vec_pretty(&self.sidecar())?)
            .map_err(|e| Error::file(&json, e))
    }

    pub fn from_pgm16(bytes: &[u8]) -> Result<Self> {
        let pgm = decode_pgm(bytes)?;
        Self::from_labels(
            pgm.width,
            pgm.height,
            pgm.data.into_iter().map(u32::from).collect(),
        )
    }

    /// Loads a partition saved with [`SuperpixelPartition::save`], checking the sidecar agrees.
    pub fn load(dir: impl AsRef<Path>, stem: &str) -> Result<Self> {
        let dir = dir.as_ref();
        let pgm = dir.join(format!("{stem}.pgm"));
        let bytes = fs::read(&pgm).map_err(|e| Error::file(&pgm, e))?;
        let partition = Self::from_pgm16(&bytes)?;
        let json = dir.join(format!("{stem}.json"));
        let sidecar: PartitionSidecar =
            serde_json::from_slice(&fs::read(&json).map_err(|e| Error::file(&json, e))?)?;
        if sidecar.count != partition.count() || sidecar.sizes != partition.sizes {
            return Err(Error::format(
                "partition sidecar",
                "does not match label grid",
            ));
        }
        Ok(partition)
    }
}

/// JSON companion of a serialized label grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSidecar {
    pub width: usize,
    pub height: usize,
    pub count: usize,
    pub centroids: Vec<(f64, f64)>,
    pub sizes: Vec<usize>,
}
