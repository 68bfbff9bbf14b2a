use super::ScaleEstimate;
use crate::error::Result;
use crate::geometry::Pixel;
use crate::imaging::{rescale_to_255, ChannelKind, Grid, GuidanceChannel};
use crate::proposals::{Proposal, ProposalSet};
use crate::scalar::Scalar;

/// Per-pixel count, over positive clicks `c`, of accepted proposals containing
/// both `c` and the pixel.
///
/// Counted per superpixel and broadcast, since every support is a union of
/// whole superpixels.
fn filtered_counts(
    proposals: &ProposalSet,
    positives: &[Pixel],
    accept: impl Fn(&Proposal) -> bool,
) -> Result<Grid<u32>> {
    let partition = proposals.partition();
    let mut multiplicity = vec![0u32; proposals.len()];
    for &c in positives {
        let sp = partition.pixel_to_superpixel(c)?;
        for &i in proposals.containing_superpixel(sp) {
            multiplicity[i as usize] += 1;
        }
    }
    for (m, p) in multiplicity.iter_mut().zip(proposals.proposals()) {
        if *m > 0 && !accept(p) {
            *m = 0;
        }
    }
    let per_sp: Vec<u32> = (0..partition.count() as u32)
        .map(|sp| {
            proposals
                .containing_superpixel(sp)
                .iter()
                .map(|&i| multiplicity[i as usize])
                .sum()
        })
        .collect();
    Grid::from_vec(
        partition.width(),
        partition.height(),
        partition
            .labels()
            .iter()
            .map(|&l| per_sp[l as usize])
            .collect(),
    )
}

/// Raw proposal counts before rescaling.
pub fn object_raw_counts(proposals: &ProposalSet, positives: &[Pixel]) -> Result<Grid<u32>> {
    filtered_counts(proposals, positives, |_| true)
}

fn counts_to_channel<T: Scalar>(
    counts: &Grid<u32>,
    kind: ChannelKind,
) -> Result<GuidanceChannel<T>> {
    rescale_to_255(&counts.map(|&c| T::of(c as f64)), false, kind)
}

/// Object guidance rescaled to `[0, 255]`; all zero without positive clicks.
pub fn object_guidance<T: Scalar>(
    proposals: &ProposalSet,
    positives: &[Pixel],
) -> Result<GuidanceChannel<T>> {
    counts_to_channel(
        &object_raw_counts(proposals, positives)?,
        ChannelKind::Object,
    )
}

/// Object guidance restricted to proposals with `f1 <= area / s^2 <= f2`.
///
/// Without a scale estimate every proposal is kept.
pub fn scale_filtered_object<T: Scalar>(
    proposals: &ProposalSet,
    positives: &[Pixel],
    scale: Option<&ScaleEstimate>,
) -> Result<GuidanceChannel<T>> {
    let counts = match scale {
        Some(s) => filtered_counts(proposals, positives, |p| s.accepts_area(p.area()))?,
        None => object_raw_counts(proposals, positives)?,
    };
    counts_to_channel(&counts, ChannelKind::ObjectScaled)
}
