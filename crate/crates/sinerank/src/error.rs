//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by matrix construction, spectral analysis, layers,
/// training, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entries must be finite, found {value} at index {index}")]
    NonFiniteEntry { index: usize, value: f64 },

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        got: usize,
        expected: usize,
    },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },

    #[error("operation requires a nonzero matrix")]
    ZeroMatrix,

    #[error("dimension mismatch: {context} (left {left:?}, right {right:?})")]
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("rank k={k} out of range for a {m}x{n} layer")]
    InvalidRank { k: usize, m: usize, n: usize },

    #[error("init scheme invalid: {reason}")]
    InvalidScheme { reason: String },

    #[error("unknown function kind `{0}` (expected sine|relu|sigmoid|tanh|identity)")]
    UnknownFunction(String),

    #[error("omega grid is empty")]
    EmptyGrid,

    #[error("omega grid must be ascending and positive")]
    InvalidGrid,

    #[error("layer dims do not chain: layer {index} outputs {out} but next expects {next_in}")]
    DimChainMismatch {
        index: usize,
        out: usize,
        next_in: usize,
    },

    #[error("model spec invalid: {0}")]
    InvalidModelSpec(String),

    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss {
        epoch: usize,
        partial: crate::nn::MetricsHistory,
    },

    #[error("shape mismatch: prediction has {pred} values, target has {target}")]
    ShapeMismatch { pred: usize, target: usize },

    #[error("bad PGM file: {0}")]
    BadPgm(String),

    #[error("layer document invalid: {0}")]
    BadLayerDoc(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
