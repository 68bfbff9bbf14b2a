//! Category-independent region proposals.
//!
//! Proposals come from a greedy agglomerative merge over the superpixel
//! adjacency graph: the adjacent pair of regions whose mean CIELAB colors are
//! closest is merged first, and every region of the resulting merge tree
//! (leaves included) becomes a proposal. Ranking is not kept.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::sync::Arc;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{image_to_lab, lab_distance, Lab};
use crate::error::{Error, Result};
use crate::geometry::Pixel;
use crate::imaging::{check_same_dims, BinaryMask, ImageBuffer};
use crate::superpixels::SuperpixelPartition;

/// A region hypothesis: a union of whole superpixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposal {
    support: BitVec,
    area: usize,
    superpixels: Vec<u32>,
}

impl Proposal {
    fn from_superpixels(partition: &SuperpixelPartition, mut superpixels: Vec<u32>) -> Self {
        superpixels.sort_unstable();
        superpixels.dedup();
        let members: BTreeSet<u32> = superpixels.iter().copied().collect();
        let support: BitVec = partition
            .labels()
            .iter()
            .map(|l| members.contains(l))
            .collect();
        let area = superpixels.iter().map(|&s| partition.size(s)).sum();
        Self {
            support,
            area,
            superpixels,
        }
    }

    pub fn area(&self) -> usize {
        self.area
    }

    /// Row-major pixel support.
    pub fn support(&self) -> &BitSlice {
        &self.support
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.support[index]
    }

    /// Sorted ids of the superpixels the proposal is made of.
    pub fn superpixels(&self) -> &[u32] {
        &self.superpixels
    }

    pub fn to_mask(&self, width: usize, height: usize) -> Result<BinaryMask> {
        BinaryMask::new(width, height, self.support.iter().by_vals().collect())
    }
}

/// Proposals over one image, tied to the partition that generated them.
#[derive(Debug, Clone)]
pub struct ProposalSet {
    proposals: Vec<Proposal>,
    partition: Arc<SuperpixelPartition>,
    by_superpixel: Vec<Vec<u32>>,
}

impl ProposalSet {
    fn build(partition: Arc<SuperpixelPartition>, proposals: Vec<Proposal>) -> Self {
        let mut by_superpixel = vec![Vec::new(); partition.count()];
        for (i, p) in proposals.iter().enumerate() {
            for &s in &p.superpixels {
                by_superpixel[s as usize].push(i as u32);
            }
        }
        Self {
            proposals,
            partition,
            by_superpixel,
        }
    }

    /// Wraps arbitrary supports. Each must be a non-empty union of whole
    /// superpixels and no two may coincide.
    pub fn from_supports(
        partition: Arc<SuperpixelPartition>,
        supports: &[BinaryMask],
    ) -> Result<Self> {
        let mut proposals = Vec::with_capacity(supports.len());
        let mut seen = BTreeSet::new();
        for (i, mask) in supports.iter().enumerate() {
            check_same_dims(partition.dims(), mask.dims())?;
            let mut inside = vec![None::<bool>; partition.count()];
            for (idx, &b) in mask.as_slice().iter().enumerate() {
                let s = partition.label_at(idx) as usize;
                match inside[s] {
                    None => inside[s] = Some(b),
                    Some(prev) if prev != b => {
                        return Err(Error::param(format!("proposal {i} splits superpixel {s}")))
                    }
                    Some(_) => {}
                }
            }
            let sps: Vec<u32> = inside
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == Some(true))
                .map(|(s, _)| s as u32)
                .collect();
            if sps.is_empty() {
                return Err(Error::param(format!("proposal {i} is empty")));
            }
            if !seen.insert(sps.clone()) {
                return Err(Error::param(format!(
                    "proposal {i} duplicates an earlier support"
                )));
            }
            proposals.push(Proposal::from_superpixels(&partition, sps));
        }
        Ok(Self::build(partition, proposals))
    }

    pub fn proposals(&self) -> &[Proposal] {
        &self.proposals
    }

    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    pub fn partition(&self) -> &Arc<SuperpixelPartition> {
        &self.partition
    }

    /// Indices of the proposals containing superpixel `sp`, ascending.
    pub fn containing_superpixel(&self, sp: u32) -> &[u32] {
        &self.by_superpixel[sp as usize]
    }

    /// Indices of the proposals whose support contains `p`, ascending.
    pub fn proposals_at(&self, p: Pixel) -> Result<Vec<usize>> {
        let sp = self.partition.pixel_to_superpixel(p)?;
        Ok(self
            .containing_superpixel(sp)
            .iter()
            .map(|&i| i as usize)
            .collect())
    }

    /// Run-length encoded container for fixtures and the UI.
    pub fn to_json(&self) -> ProposalSetJson {
        ProposalSetJson {
            width: self.partition.width(),
            height: self.partition.height(),
            proposals: self
                .proposals
                .iter()
                .map(|p| EncodedProposal {
                    area: p.area,
                    runs: encode_runs(&p.support),
                })
                .collect(),
        }
    }

    pub fn from_json(partition: Arc<SuperpixelPartition>, json: &ProposalSetJson) -> Result<Self> {
        let (w, h) = partition.dims();
        check_same_dims((w, h), (json.width, json.height))?;
        let mut masks = Vec::with_capacity(json.proposals.len());
        for enc in &json.proposals {
            let mut bits = vec![false; w * h];
            for &(start, len) in &enc.runs {
                let end = start
                    .checked_add(len)
                    .filter(|&e| e <= bits.len())
                    .ok_or_else(|| Error::format("proposal runs", "run exceeds grid"))?;
                bits[start..end].fill(true);
            }
            let mask = BinaryMask::new(w, h, bits)?;
            if mask.count() != enc.area {
                return Err(Error::format("proposal runs", "area does not match runs"));
            }
            masks.push(mask);
        }
        Self::from_supports(partition, &masks)
    }
}

fn encode_runs(bits: &BitSlice) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while let Some(start) = bits[i..].first_one().map(|o| o + i) {
        let len = bits[start..].first_zero().unwrap_or(bits.len() - start);
        runs.push((start, len));
        i = start + len;
    }
    runs
}

/// Serialized proposal set: each support as `(start, length)` runs over the row-major grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalSetJson {
    pub width: usize,
    pub height: usize,
    pub proposals: Vec<EncodedProposal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedProposal {
    pub area: usize,
    pub runs: Vec<(usize, usize)>,
}

/// Default proposal budget: the size of the full binary merge tree.
pub fn default_max_proposals(partition: &SuperpixelPartition) -> usize {
    2 * partition.count()
}

struct Candidate {
    distance: f64,
    area: usize,
    lo: usize,
    hi: usize,
}

impl Candidate {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.area.cmp(&other.area))
            .then(self.lo.cmp(&other.lo))
            .then(self.hi.cmp(&other.hi))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Reversed: BinaryHeap pops the closest pair first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

struct Region {
    superpixels: Vec<u32>,
    area: usize,
    lab_sum: Lab,
    neighbors: BTreeSet<usize>,
    alive: bool,
}

impl Region {
    fn mean(&self) -> Lab {
        let n = self.area as f64;
        [
            self.lab_sum[0] / n,
            self.lab_sum[1] / n,
            self.lab_sum[2] / n,
        ]
    }
}

/// Builds the merge-tree proposal set, keeping the first `max_proposals`
/// regions in merge order (all singletons come first).
pub fn generate_proposals(
    image: &ImageBuffer,
    partition: Arc<SuperpixelPartition>,
    max_proposals: usize,
) -> Result<ProposalSet> {
    check_same_dims(partition.dims(), image.dims())?;
    let count = partition.count();
    if max_proposals < count {
        return Err(Error::param(format!(
            "max_proposals={max_proposals} is below the superpixel count {count}"
        )));
    }
    let lab = image_to_lab(image);
    let mut regions: Vec<Region> = (0..count)
        .map(|s| Region {
            superpixels: vec![s as u32],
            area: partition.size(s as u32),
            lab_sum: [0.0; 3],
            neighbors: partition
                .neighbors(s as u32)
                .iter()
                .map(|&n| n as usize)
                .collect(),
            alive: true,
        })
        .collect();
    for (i, l) in lab.iter().enumerate() {
        let r = &mut regions[partition.label_at(i) as usize].lab_sum;
        r[0] += l[0];
        r[1] += l[1];
        r[2] += l[2];
    }

    let mut heap = BinaryHeap::new();
    let candidate = |regions: &[Region], a: usize, b: usize| Candidate {
        distance: lab_distance(&regions[a].mean(), &regions[b].mean()),
        area: regions[a].area + regions[b].area,
        lo: a.min(b),
        hi: a.max(b),
    };
    for a in 0..count {
        for &b in &regions[a].neighbors {
            if a < b {
                heap.push(candidate(&regions, a, b));
            }
        }
    }

    let mut proposals: Vec<Proposal> = (0..count)
        .map(|s| Proposal::from_superpixels(&partition, vec![s as u32]))
        .collect();

    while proposals.len() < max_proposals {
        let Some(c) = heap.pop() else { break };
        if !regions[c.lo].alive || !regions[c.hi].alive {
            continue;
        }
        let id = regions.len();
        regions[c.lo].alive = false;
        regions[c.hi].alive = false;
        let (a, b) = (&regions[c.lo], &regions[c.hi]);
        let mut superpixels = [a.superpixels.as_slice(), b.superpixels.as_slice()].concat();
        superpixels.sort_unstable();
        let neighbors: BTreeSet<usize> = a
            .neighbors
            .union(&b.neighbors)
            .copied()
            .filter(|&n| n != c.lo && n != c.hi)
            .collect();
        let merged = Region {
            area: a.area + b.area,
            lab_sum: [
                a.lab_sum[0] + b.lab_sum[0],
                a.lab_sum[1] + b.lab_sum[1],
                a.lab_sum[2] + b.lab_sum[2],
            ],
            superpixels: superpixels.clone(),
            neighbors: neighbors.clone(),
            alive: true,
        };
        regions.push(merged);
        for &n in &neighbors {
            let nb = &mut regions[n].neighbors;
            nb.remove(&c.lo);
            nb.remove(&c.hi);
            nb.insert(id);
            heap.push(candidate(&regions, n, id));
        }
        proposals.push(Proposal::from_superpixels(&partition, superpixels));
    }

    Ok(ProposalSet::build(partition, proposals))
}
