//! Per-frame spatial score: JSD between sketch-token vectors of matched
//! patches, pooled with a β-norm divided by the number of matches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::MetricConfig;
use crate::divergence::jsd;
use crate::error::MetricError;
use crate::keypoints::{analyze_frame, filter_with, match_points_with, Feature, FilterConfig, MatchingMatrix};
use crate::scalar::Scalar;
use crate::sketch::{st_vector, StCodebook};
use crate::video::{Frame, PairedSequences, Sequence};

/// `[Σ dᵢ^β]^{1/β} / N`; zero for an empty input.
pub fn minkowski_pool<T: Scalar>(distances: &[T], beta: T) -> T {
    if distances.is_empty() {
        return T::zero();
    }
    let sum: T = distances.iter().map(|d| d.powf(beta)).sum();
    let n = T::from_usize(distances.len()).expect("count representable");
    sum.powf(T::one() / beta) / n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub value: f64,
    pub n_matches: usize,
    pub frame_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialScore {
    /// Mean over scored frames.
    pub value: f64,
    pub per_frame: Vec<FrameScore>,
    /// Frame indices rejected for too few matches.
    pub skipped: Vec<usize>,
}

impl SpatialScore {
    pub fn frames_scored(&self) -> usize {
        self.per_frame.len()
    }
}

fn round_center(p: (f64, f64)) -> (usize, usize) {
    (p.0.round() as usize, p.1.round() as usize)
}

/// JSD of every pair in the matrix, in matrix order.
pub fn pair_divergences(
    reference: &Frame,
    test: &Frame,
    matrix: &MatchingMatrix,
    codebook: &StCodebook,
) -> Result<Vec<f64>, MetricError> {
    matrix
        .pairs
        .iter()
        .map(|m| {
            let a = st_vector(codebook, reference, round_center(m.ref_point))?;
            let b = st_vector(codebook, test, round_center(m.test_point))?;
            Ok(jsd(&a, &b).expect("codebook output lies on the simplex"))
        })
        .collect()
}

/// Pooled score of an explicit matching matrix.
pub fn score_matching_matrix(
    reference: &Frame,
    test: &Frame,
    matrix: &MatchingMatrix,
    codebook: &StCodebook,
    beta: f64,
) -> Result<f64, MetricError> {
    check_beta(beta)?;
    let d = pair_divergences(reference, test, matrix, codebook)?;
    Ok(minkowski_pool(&d, beta))
}

pub(crate) fn check_beta(beta: f64) -> Result<(), MetricError> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(MetricError::InvalidBeta(beta));
    }
    Ok(())
}

/// Scores two frames whose features were computed beforehand.
#[allow(clippy::too_many_arguments)]
pub(crate) fn score_features(
    reference: &Frame,
    ref_features: &[Feature],
    test: &Frame,
    test_features: &[Feature],
    codebook: &StCodebook,
    cfg: &MetricConfig,
    filter: &FilterConfig,
    frame_index: usize,
) -> Result<FrameScore, MetricError> {
    let matches = match_points_with(ref_features, test_features, &cfg.matching);
    let matrix = filter_with(&matches, reference.dims(), filter);
    if matrix.len() < cfg.min_matches.max(1) {
        return Err(MetricError::InsufficientMatches {
            frame: frame_index,
            found: matrix.len(),
            required: cfg.min_matches.max(1),
        });
    }
    let value = score_matching_matrix(reference, test, &matrix, codebook, cfg.beta)?;
    Ok(FrameScore {
        value,
        n_matches: matrix.len(),
        frame_index,
    })
}

/// Spatial score of one reference/test frame pair, using `cfg.beta`.
pub fn st_iqm_frame(
    reference: &Frame,
    test: &Frame,
    codebook: &StCodebook,
    cfg: &MetricConfig,
) -> Result<FrameScore, MetricError> {
    check_beta(cfg.beta)?;
    if reference.dims() != test.dims() {
        let (rw, rh) = reference.dims();
        let (tw, th) = test.dims();
        return Err(crate::video::VideoError::DimensionMismatch(rw, rh, tw, th).into());
    }
    let rf = analyze_frame(reference, &cfg.detector);
    let tf = analyze_frame(test, &cfg.detector);
    score_features(reference, &rf, test, &tf, codebook, cfg, &cfg.filter, reference.index())
}

/// Detected and described points of every frame of a sequence.
#[derive(Debug, Clone)]
pub struct SequenceFeatures {
    pub frames: Vec<Vec<Feature>>,
}

pub fn analyze_sequence(seq: &Sequence, cfg: &MetricConfig) -> SequenceFeatures {
    SequenceFeatures {
        frames: seq.frames().par_iter().map(|f| analyze_frame(f, &cfg.detector)).collect(),
    }
}

pub(crate) fn st_iqm_sequence_analyzed(
    pair: &PairedSequences,
    ref_features: &SequenceFeatures,
    test_features: &SequenceFeatures,
    codebook: &StCodebook,
    cfg: &MetricConfig,
) -> Result<SpatialScore, MetricError> {
    check_beta(cfg.beta)?;
    let results: Vec<Result<FrameScore, MetricError>> = (0..pair.reference.len())
        .into_par_iter()
        .map(|i| {
            score_features(
                &pair.reference.frames()[i],
                &ref_features.frames[i],
                &pair.test.frames()[i],
                &test_features.frames[i],
                codebook,
                cfg,
                &cfg.filter,
                i,
            )
        })
        .collect();
    let mut per_frame = Vec::new();
    let mut skipped = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => per_frame.push(s),
            Err(MetricError::InsufficientMatches { .. }) => skipped.push(i),
            Err(e) => return Err(e),
        }
    }
    if per_frame.is_empty() {
        return Err(MetricError::AllFramesUnscorable);
    }
    // index-ordered sum keeps the mean independent of scheduling
    let value = per_frame.iter().map(|s| s.value).sum::<f64>() / per_frame.len() as f64;
    Ok(SpatialScore {
        value,
        per_frame,
        skipped,
    })
}

/// Frame-wise spatial scores averaged over the frames that could be scored.
pub fn st_iqm_sequence(
    pair: &PairedSequences,
    codebook: &StCodebook,
    cfg: &MetricConfig,
) -> Result<SpatialScore, MetricError> {
    let rf = analyze_sequence(&pair.reference, cfg);
    let tf = analyze_sequence(&pair.test, cfg);
    st_iqm_sequence_analyzed(pair, &rf, &tf, codebook, cfg)
}
