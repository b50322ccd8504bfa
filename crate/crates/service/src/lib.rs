//! HTTP service and command-line front end for the typespace catalog.

pub mod api;
pub mod cli;
pub mod error;

pub use api::{router, AppState};
pub use error::ApiError;

/// Version stamped on every API response body.
pub const API_VERSION: u32 = 1;
