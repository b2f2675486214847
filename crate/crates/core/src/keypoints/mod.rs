//! Interest points, descriptors and reference → test correspondences.
//!
//! Detection uses box-filter approximations of the Hessian on an integral
//! image over three octaves; descriptors are upright Haar-wavelet sums.
//! Matches are filtered into a [`MatchingMatrix`] whose points all carry a
//! full 35×35 patch.

mod descriptor;
mod detector;
mod integral;
mod matching;

use thiserror::Error;

pub use descriptor::{compute_descriptor, Descriptor, DESCRIPTOR_LEN, PATCH_MARGIN};
pub use detector::{detect_interest_points, filter_size, DetectorConfig, InterestPoint};
pub use integral::IntegralImage;
pub use matching::{
    filter_matches, filter_with, match_points, match_points_with, FilterConfig, MatchConfig, MatchPair,
    MatchingMatrix,
};

use crate::video::Frame;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeypointError {
    #[error("point ({x:.1}, {y:.1}) lies closer than {margin} px to the frame border")]
    BorderProximity { x: f64, y: f64, margin: f64 },
}

/// An interest point together with its descriptor.
pub type Feature = (InterestPoint, Descriptor);

/// Detects and describes every point whose patch fits inside the frame.
pub fn analyze_frame(frame: &Frame, config: &DetectorConfig) -> Vec<Feature> {
    let ii = IntegralImage::new(frame);
    detector::detect_on_integral(&ii, config)
        .into_iter()
        .filter_map(|p| descriptor::describe_on_integral(&ii, &p).ok().map(|d| (p, d)))
        .collect()
}
