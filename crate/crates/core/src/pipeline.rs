//! End-to-end scoring of a reference/test sequence pair.

use serde::{Deserialize, Serialize};

use crate::config::MetricConfig;
use crate::error::MetricError;
use crate::fusion::{st_vqm, FusionParams};
use crate::sketch::StCodebook;
use crate::spatial::{analyze_sequence, st_iqm_sequence_analyzed, SpatialScore};
use crate::temporal::{st_t_with_coverage, temporal_vector_analyzed, TemporalDistance, TemporalVector};
use crate::video::PairedSequences;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoScore {
    pub st_iqm: f64,
    pub st_iqm_scaled: f64,
    pub st_t: f64,
    pub st_t_scaled: f64,
    pub st_vqm: f64,
    pub frames_scored: usize,
    pub frames_total: usize,
    pub spatial: SpatialScore,
    pub temporal: TemporalDistance<f64>,
    pub temporal_reference: TemporalVector<f64>,
    pub temporal_test: TemporalVector<f64>,
}

/// Detects and describes every frame once, then derives the spatial score,
/// both temporal vectors, their distance and the fused score.
pub fn score_pair(
    pair: &PairedSequences,
    codebook: &StCodebook,
    cfg: &MetricConfig,
    fusion: &FusionParams<f64>,
) -> Result<VideoScore, MetricError> {
    let ref_features = analyze_sequence(&pair.reference, cfg);
    let test_features = analyze_sequence(&pair.test, cfg);
    let spatial = st_iqm_sequence_analyzed(pair, &ref_features, &test_features, codebook, cfg)?;
    let temporal_reference = temporal_vector_analyzed(&pair.reference, &ref_features, codebook, cfg)?;
    let temporal_test = temporal_vector_analyzed(&pair.test, &test_features, codebook, cfg)?;
    let temporal = st_t_with_coverage(&temporal_reference, &temporal_test, cfg.temporal.min_coverage)?;
    Ok(VideoScore {
        st_iqm: spatial.value,
        st_iqm_scaled: spatial.value * fusion.spatial_scale,
        st_t: temporal.value,
        st_t_scaled: temporal.value * fusion.temporal_scale,
        st_vqm: st_vqm(spatial.value, temporal.value, fusion),
        frames_scored: spatial.frames_scored(),
        frames_total: pair.reference.len(),
        spatial,
        temporal,
        temporal_reference,
        temporal_test,
    })
}
