//! Full-reference video quality assessment from sketch-token statistics.
//!
//! Interest points are matched between reference and test frames, the
//! patches around them are described by a random-forest contour codebook,
//! and the Jensen–Shannon divergence between the resulting distributions is
//! pooled into a spatial score. Frame-to-frame scores within each sequence
//! form temporal vectors whose distance is the temporal score. An affine
//! fusion combines both.

pub mod config;
pub mod distortion;
pub mod divergence;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod keypoints;
pub mod linalg;
pub mod pipeline;
pub mod scalar;
pub mod sketch;
pub mod spatial;
pub mod temporal;
pub mod video;

pub use config::{MetricConfig, TemporalConfig, TemporalMode};
pub use error::MetricError;
pub use pipeline::{score_pair, VideoScore};
pub use scalar::Scalar;

/// Sketch-token vector over `f64`.
pub type StVec = sketch::StVector<f64>;
pub type StVec32 = sketch::StVector<f32>;
pub type Fusion = fusion::FusionParams<f64>;
pub type Fusion32 = fusion::FusionParams<f32>;
pub type FitReport = fusion::FitReport<f64>;
pub type TemporalVec = temporal::TemporalVector<f64>;
