//! Tunable settings of the scoring pipeline.

use serde::{Deserialize, Serialize};

use crate::keypoints::{DetectorConfig, FilterConfig, MatchConfig};

/// How consecutive frames are paired when building temporal vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TemporalMode {
    /// Full detect → match → filter pipeline between consecutive frames.
    #[default]
    Matched,
    /// Patches at the same coordinates, anchored on the earlier frame's points.
    CoLocated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemporalConfig {
    pub mode: TemporalMode,
    /// Multiplier on the horizontal displacement limit for frame-to-frame matching.
    pub dx_scale: f64,
    /// Fraction of retained components below which a temporal distance is
    /// flagged as low confidence.
    pub min_coverage: f64,
}

impl Default for TemporalConfig {
    fn default() -> Self {
        Self {
            mode: TemporalMode::Matched,
            dx_scale: 2.0,
            min_coverage: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub detector: DetectorConfig,
    pub matching: MatchConfig,
    pub filter: FilterConfig,
    /// Minkowski pooling exponent.
    pub beta: f64,
    /// Frames with fewer filtered matches are not scored.
    pub min_matches: usize,
    pub temporal: TemporalConfig,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            matching: MatchConfig::default(),
            filter: FilterConfig::default(),
            beta: 4.0,
            min_matches: 5,
            temporal: TemporalConfig::default(),
        }
    }
}

impl MetricConfig {
    pub fn temporal_filter(&self) -> FilterConfig {
        FilterConfig {
            dx_max: self.filter.dx_max * self.temporal.dx_scale,
            ..self.filter
        }
    }
}
