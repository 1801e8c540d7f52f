use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}")]
    Dimension { width: usize, height: usize },

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("coordinates ({x}, {y}) outside {width}x{height} image")]
    Bounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("infeasible clustering: k = {k} exceeds n = {n}")]
    Infeasible { k: usize, n: usize },

    #[error("invalid palette: {0}")]
    Palette(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("level {0} out of range")]
    Range(f64),

    #[error("cluster {0} has no pixels to sample")]
    EmptySample(usize),

    #[error("arithmetic overflow")]
    Overflow,
}
