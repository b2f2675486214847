//! Sketch-token contour descriptors.
//!
//! A codebook maps the channel features of a 35×35 patch to a probability
//! vector over 150 contour classes plus one no-contour class. Codebooks are
//! trained here on a procedural corpus ([`corpus`]) and stored as JSON.

mod channels;
mod codebook;
pub mod corpus;
mod forest;
mod vector;

use thiserror::Error;

pub use channels::{
    channel, extract_channel_features, patch_features, ChannelFeatures, FeatureConfig, CHANNEL_LEN, FEATURE_LEN,
    N_CHANNELS, PATCH_RADIUS, PATCH_SIZE,
};
pub use codebook::{
    load_codebook, save_codebook, st_vector, train_codebook, train_default_codebook, StCodebook, CODEBOOK_VERSION,
    DEFAULT_PATCHES_PER_CLASS,
};
pub use corpus::{generate_synthetic_corpus, LabeledPatch, LabeledPatchCorpus};
pub use forest::{ForestParams, LeafHistogram, Split, Tree};
pub use vector::StVector;

/// Contour classes plus the no-contour class.
pub const N_CLASSES: usize = 151;
pub const N_CONTOUR_CLASSES: usize = 150;
/// Label of the no-contour class.
pub const BLANK_CLASS: usize = 151;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SketchError {
    #[error("patch centre ({x}, {y}) lies closer than 17 px to the frame border")]
    BorderProximity { x: usize, y: usize },
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("codebook version {found} not supported (reader version {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt codebook file: {0}")]
    Corrupt(String),
    #[error("{0}")]
    Io(String),
    #[error("class {label} has {count} examples, at least 2 required")]
    CorpusTooSmall { label: usize, count: usize },
    #[error("corpus must have {N_CLASSES} classes, got {0}")]
    ClassCount(usize),
    #[error("vector not on the probability simplex: {0}")]
    NotOnSimplex(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
