//! Sessions, file formats, HTTP API and CLI around `lulc-core`.

pub mod error;
pub mod formats;
pub mod http;
pub mod imageio;
pub mod pipeline;
pub mod session;

pub use error::{Result, WorkbenchError};
pub use pipeline::{run_pipeline, PipelineOptions, PipelineOutput};
pub use session::SessionStore;
