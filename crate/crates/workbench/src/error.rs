use std::io;

#[derive(Debug, thiserror::Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Core(#[from] lulc_core::Error),

    #[error("cannot decode image: {0}")]
    Decode(String),

    #[error("image has zero width or height")]
    EmptyImage,

    #[error("cannot encode image: {0}")]
    Encode(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("bad request: {0}")]
    BadRequest(String),

    #[error("{0}")]
    Rejected(String),
}

pub type Result<T, E = WorkbenchError> = std::result::Result<T, E>;
