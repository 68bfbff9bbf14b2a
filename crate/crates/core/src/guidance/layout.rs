use crate::error::{Error, Result};
use crate::imaging::ChannelKind;

use ChannelKind::*;

/// Named channel layouts. `full` is the scale-aware configuration with the
/// previous-prediction channel.
pub const LAYOUT_PRESETS: &[(&str, &[ChannelKind])] = &[
    ("euclidean", &[EuclideanPos, EuclideanNeg]),
    ("euclidean-iter", &[EuclideanPos, EuclideanNeg, PrevMask]),
    ("gaussian", &[GaussianPos, GaussianNeg]),
    ("sp", &[SpPos, SpNeg]),
    ("sp-obj", &[SpPos, SpNeg, Object]),
    ("sp-obj-iter", &[SpPos, SpNeg, Object, PrevMask]),
    ("sp-obj-scaled", &[SpPosScaled, SpNegScaled, ObjectScaled]),
    ("full", &[SpPosScaled, SpNegScaled, ObjectScaled, PrevMask]),
];

/// Resolves a preset name or a comma-separated list of channel kinds.
pub fn parse_layout(spec: &str) -> Result<Vec<ChannelKind>> {
    if let Some((_, kinds)) = LAYOUT_PRESETS.iter().find(|(n, _)| *n == spec) {
        return Ok(kinds.to_vec());
    }
    let kinds = spec
        .split(',')
        .map(|s| s.trim().parse::<ChannelKind>())
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::Configuration(format!("unknown layout '{spec}'")))?;
    for (i, k) in kinds.iter().enumerate() {
        if kinds[..i].contains(k) {
            return Err(Error::Configuration(format!("layout repeats {k}")));
        }
    }
    Ok(kinds)
}
