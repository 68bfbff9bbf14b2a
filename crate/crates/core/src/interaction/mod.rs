//! The click loop: simulated users, scale estimation, segmenters and sessions.

mod correction;
mod live;
mod reference;
mod sampling;
mod scale;
mod scene;
mod segmenter;
mod session;

pub use correction::{
    boundary_pixels, correction_click, exterior_distance, interior_distance, max_boundary_point,
};
pub use live::{InteractiveSession, SessionSummary};
pub use reference::ReferenceSegmenter;
pub use sampling::{
    add_or_replace, random_correction_click, sample_negative_clicks, sample_positive_clicks,
    simulate_initial_clicks, simulate_iterative_clicks, NegativeSample, NegativeStrategy,
    PositiveSample, SamplingConfig,
};
pub use scale::{estimate_scale, scale_from_mask};
pub use scene::Scene;
pub use segmenter::{EmptySegmenter, OracleSegmenter, SegmentationContext, Segmenter};
pub use session::{
    run_session, ClickPolicy, ScaleSource, SessionAbort, SessionConfig, SessionState, TraceRecord,
    MAX_BUDGET,
};
