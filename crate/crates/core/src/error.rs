use thiserror::Error;

/// Errors raised by the core engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size must be >= 2, got {0}")]
    GridTooSmall(usize),
    #[error("grid not increasing at index {0}")]
    GridNotIncreasing(usize),
    #[error("grid must start at 0 and end at 1")]
    GridDomain,
    #[error("grid lengths differ across axes")]
    GridLengthMismatch,
    #[error("value array has length {got}, expected {expected}")]
    ValueLength { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("non-finite input coordinate (corrupt frame data)")]
    NonFiniteInput,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("frames ({height}x{width}) smaller than the {window}x{window} window")]
    FrameTooSmall {
        height: usize,
        width: usize,
        window: usize,
    },
    #[error("need at least {needed} frames, got {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("pair index {index} out of range for a video with {frames} frames")]
    PairIndexOutOfRange { index: usize, frames: usize },
    #[error("zero-size frame")]
    EmptyFrame,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("non-finite gradient at step {step}")]
    NonFiniteGradient { step: usize },
    #[error("fit diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
