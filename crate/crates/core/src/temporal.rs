//! Temporal structure inconsistency: frame-to-frame spatial scores within a
//! sequence, compared between reference and test by Euclidean distance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{MetricConfig, TemporalMode};
use crate::error::MetricError;
use crate::keypoints::{filter_with, MatchPair};
use crate::scalar::Scalar;
use crate::sketch::StCodebook;
use crate::spatial::{analyze_sequence, check_beta, score_features, score_matching_matrix, SequenceFeatures};
use crate::video::Sequence;

/// Component `i` scores frames `i → i + 1`; `None` marks an unscorable pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalVector<T> {
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> TemporalVector<T> {
    pub fn from_values(values: impl IntoIterator<Item = T>) -> Self {
        Self {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn gaps(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.is_none().then_some(i))
            .collect()
    }

    /// Indices of the `k` largest scored components, largest first.
    pub fn top_components(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<(usize, T)> = self
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .collect();
        idx.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        idx.into_iter().take(k).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalDistance<T> {
    pub value: T,
    /// Components present in both vectors.
    pub retained: usize,
    pub total: usize,
    /// Indices dropped because either side is a gap.
    pub excluded: Vec<usize>,
    pub coverage: f64,
    pub low_confidence: bool,
}

/// Euclidean distance over components scored on both sides; flags results
/// whose coverage drops below 0.8.
pub fn st_t<T: Scalar>(reference: &TemporalVector<T>, test: &TemporalVector<T>) -> Result<TemporalDistance<T>, MetricError> {
    st_t_with_coverage(reference, test, 0.8)
}

pub fn st_t_with_coverage<T: Scalar>(
    reference: &TemporalVector<T>,
    test: &TemporalVector<T>,
    min_coverage: f64,
) -> Result<TemporalDistance<T>, MetricError> {
    if reference.len() != test.len() {
        return Err(MetricError::LengthMismatch(reference.len(), test.len()));
    }
    let mut sum = T::zero();
    let mut retained = 0;
    let mut excluded = Vec::new();
    for (i, (a, b)) in reference.values.iter().zip(&test.values).enumerate() {
        match (a, b) {
            (Some(a), Some(b)) => {
                let d = *a - *b;
                sum = sum + d * d;
                retained += 1;
            }
            _ => excluded.push(i),
        }
    }
    if retained == 0 {
        return Err(MetricError::NoOverlap);
    }
    let coverage = retained as f64 / reference.len() as f64;
    Ok(TemporalDistance {
        value: sum.sqrt(),
        retained,
        total: reference.len(),
        excluded,
        coverage,
        low_confidence: coverage < min_coverage,
    })
}

fn colocated_component(
    seq: &Sequence,
    features: &SequenceFeatures,
    i: usize,
    codebook: &StCodebook,
    cfg: &MetricConfig,
) -> Result<f64, MetricError> {
    let (a, b) = (&seq.frames()[i], &seq.frames()[i + 1]);
    let pairs: Vec<MatchPair> = features.frames[i]
        .iter()
        .map(|(p, _)| MatchPair {
            ref_point: (p.x, p.y),
            test_point: (p.x, p.y),
            descriptor_distance: 0.0,
        })
        .collect();
    let matrix = filter_with(&pairs, a.dims(), &cfg.filter);
    if matrix.len() < cfg.min_matches.max(1) {
        return Err(MetricError::InsufficientMatches {
            frame: i,
            found: matrix.len(),
            required: cfg.min_matches.max(1),
        });
    }
    score_matching_matrix(a, b, &matrix, codebook, cfg.beta)
}

pub(crate) fn temporal_vector_analyzed(
    seq: &Sequence,
    features: &SequenceFeatures,
    codebook: &StCodebook,
    cfg: &MetricConfig,
) -> Result<TemporalVector<f64>, MetricError> {
    if seq.len() < 2 {
        return Err(MetricError::TooShortSequence(seq.len()));
    }
    check_beta(cfg.beta)?;
    let filter = cfg.temporal_filter();
    let results: Vec<Result<f64, MetricError>> = (0..seq.len() - 1)
        .into_par_iter()
        .map(|i| match cfg.temporal.mode {
            TemporalMode::Matched => score_features(
                &seq.frames()[i],
                &features.frames[i],
                &seq.frames()[i + 1],
                &features.frames[i + 1],
                codebook,
                cfg,
                &filter,
                i,
            )
            .map(|s| s.value),
            TemporalMode::CoLocated => colocated_component(seq, features, i, codebook, cfg),
        })
        .collect();
    let mut values = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => values.push(Some(v)),
            Err(MetricError::InsufficientMatches { .. }) => values.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(TemporalVector { values })
}

/// Frame-to-frame spatial scores of consecutive frames within `seq`.
pub fn temporal_vector(seq: &Sequence, codebook: &StCodebook, cfg: &MetricConfig) -> Result<TemporalVector<f64>, MetricError> {
    if seq.len() < 2 {
        return Err(MetricError::TooShortSequence(seq.len()));
    }
    let features = analyze_sequence(seq, cfg);
    temporal_vector_analyzed(seq, &features, codebook, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let a = TemporalVector::from_values([0.0f64, 0.0]);
        let b = TemporalVector::from_values([3.0f64, 4.0]);
        let d = st_t(&a, &b).unwrap();
        assert_eq!(d.value, 5.0);
        assert_eq!(d.coverage, 1.0);
        assert!(!d.low_confidence);
    }

    #[test]
    fn gaps_are_excluded_and_reported() {
        let a = TemporalVector {
            values: vec![Some(1.0f64), None, Some(2.0), Some(0.0), Some(0.0)],
        };
        let b = TemporalVector {
            values: vec![Some(1.0f64), Some(9.0), None, Some(3.0), Some(4.0)],
        };
        let d = st_t(&a, &b).unwrap();
        assert_eq!(d.value, 5.0);
        assert_eq!(d.excluded, vec![1, 2]);
        assert_eq!(d.retained, 3);
        assert!(d.low_confidence);
    }

    #[test]
    fn errors() {
        let a = TemporalVector::from_values([1.0f64]);
        let b = TemporalVector::from_values([1.0f64, 2.0]);
        assert!(matches!(st_t(&a, &b), Err(MetricError::LengthMismatch(1, 2))));
        let g = TemporalVector::<f64> { values: vec![None] };
        assert!(matches!(st_t(&g, &a), Err(MetricError::NoOverlap)));
    }

    #[test]
    fn top_components_order() {
        let v = TemporalVector {
            values: vec![Some(0.1f64), Some(0.9), None, Some(0.5), Some(0.9)],
        };
        assert_eq!(v.top_components(3), vec![1, 4, 3]);
        assert_eq!(v.gaps(), vec![2]);
    }
}
