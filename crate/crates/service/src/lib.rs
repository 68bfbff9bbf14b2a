//! HTTP session API around the interactive segmentation loop.
//!
//! Each uploaded image gets superpixels and proposals once; clicks then only
//! rebuild the guidance stack and the reference prediction.

pub mod api;
pub mod error;
pub mod state;

pub use api::{router, ClickRequest, Created, MaskReply};
pub use error::ApiError;
pub use state::{spawn_reaper, AppState, ServiceConfig, SessionHandle};
