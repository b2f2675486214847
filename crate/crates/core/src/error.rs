use thiserror::Error;

use crate::sketch::SketchError;
use crate::video::VideoError;

/// Failures of the frame, sequence and video scoring pipeline.
#[derive(Debug, Error)]
pub enum MetricError {
    #[error("frame {frame}: {found} filtered matches, at least {required} required")]
    InsufficientMatches { frame: usize, found: usize, required: usize },
    #[error("no frame of the sequence could be scored")]
    AllFramesUnscorable,
    #[error("Minkowski exponent must be >= 1, got {0}")]
    InvalidBeta(f64),
    #[error("sequence has {0} frames; temporal scoring needs at least 2")]
    TooShortSequence(usize),
    #[error("temporal vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("temporal vectors share no scored component")]
    NoOverlap,
    #[error(transparent)]
    Video(#[from] VideoError),
    #[error(transparent)]
    Sketch(#[from] SketchError),
}
