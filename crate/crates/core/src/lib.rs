//! Click guidance maps for interactive instance segmentation.
//!
//! User clicks are turned into guidance channels that follow image structure:
//! superpixel distance maps, object-proposal count maps and scale-aware
//! versions of both. The crate also provides the SLIC partitioner and
//! merge-tree proposals those maps need, a simulated user and a classical
//! reference segmenter for running the click loop end to end.
//!
//! Map-producing routines are generic over the channel scalar ([`Scalar`]);
//! the aliases below fix it to `f64` or `f32`.

pub mod color;
pub mod components;
pub mod error;
pub mod geometry;
pub mod guidance;
pub mod imaging;
pub mod interaction;
pub mod proposals;
pub mod scalar;
pub mod superpixels;

pub use error::{Error, Result};
pub use geometry::{Pixel, Polarity};
pub use guidance::{Click, ClickSet, ScaleEstimate, ScaleParams, StackConfig, TruncationMode};
pub use imaging::{BinaryMask, ChannelKind, Grid, ImageBuffer};
pub use interaction::{
    run_session, InteractiveSession, ReferenceSegmenter, Scene, Segmenter, SessionConfig,
    SessionState,
};
pub use proposals::{generate_proposals, Proposal, ProposalSet};
pub use scalar::Scalar;
pub use superpixels::{slic, SlicParams, SuperpixelPartition};

pub type GuidanceChannel = imaging::GuidanceChannel<f64>;
pub type GuidanceChannelF32 = imaging::GuidanceChannel<f32>;
pub type GuidanceStack = imaging::GuidanceStack<f64>;
pub type GuidanceStackF32 = imaging::GuidanceStack<f32>;
