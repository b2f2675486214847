//! Affine fusion of spatial and temporal scores, and the repeated-split fit
//! of its weights.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::stats::pearson;
use crate::linalg::least_squares;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("need at least {required} samples, got {found}")]
    TooFewSamples { found: usize, required: usize },
    #[error("scores and subjective values differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid fusion parameters: {0}")]
    InvalidParams(String),
}

/// `w_s · (S · spatial_scale) + w_t · (T · temporal_scale) + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FusionParams<T> {
    pub w_s: T,
    pub w_t: T,
    pub gamma: T,
    pub spatial_scale: T,
    pub temporal_scale: T,
}

impl<T: Scalar> Default for FusionParams<T> {
    fn default() -> Self {
        Self {
            w_s: T::lit(0.28),
            w_t: T::lit(-0.43),
            gamma: T::lit(3.26),
            spatial_scale: T::lit(1e10),
            temporal_scale: T::lit(1e5),
        }
    }
}

impl<T: Scalar> FusionParams<T> {
    pub fn with_weights(w_s: T, w_t: T, gamma: T) -> Self {
        Self {
            w_s,
            w_t,
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        let all = [self.w_s, self.w_t, self.gamma, self.spatial_scale, self.temporal_scale];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(FusionError::InvalidParams("non-finite value".into()));
        }
        if self.spatial_scale <= T::zero() || self.temporal_scale <= T::zero() {
            return Err(FusionError::InvalidParams("scales must be positive".into()));
        }
        Ok(())
    }

    pub fn weights(&self) -> [T; 3] {
        [self.w_s, self.w_t, self.gamma]
    }
}

pub fn st_vqm<T: Scalar>(spatial: T, temporal: T, params: &FusionParams<T>) -> T {
    let s = spatial * params.spatial_scale;
    let t = temporal * params.temporal_scale;
    params.w_s * s + params.w_t * t + params.gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub n_splits: usize,
    pub train_frac: f64,
    pub seed: u64,
    /// Decimal places kept before taking the per-parameter mode.
    pub decimals: u32,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_splits: 1000,
            train_frac: 0.8,
            seed: 0,
            decimals: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFit<T> {
    /// `None` when the training portion was singular.
    pub raw: Option<[T; 3]>,
    pub rounded: Option<[T; 3]>,
    /// Correlation of fused scores with subjective values on the test portion.
    pub pcc: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin<T> {
    pub value: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FitReport<T> {
    pub chosen: FusionParams<T>,
    pub per_split: Vec<SplitFit<T>>,
    /// Frequency of each rounded value of `w_s`, `w_t` and `gamma`, in that order.
    pub histograms: [Vec<HistogramBin<T>>; 3],
}

pub const MIN_FIT_SAMPLES: usize = 10;

fn is_constant<T: Scalar>(v: impl Iterator<Item = T>) -> bool {
    let mut it = v;
    let Some(first) = it.next() else { return true };
    it.all(|x| x == first)
}

/// Mode of rounded keys; ties go to the smaller magnitude, then the smaller key.
fn mode_key(counts: &BTreeMap<i64, usize>) -> i64 {
    let mut best: Option<(i64, usize)> = None;
    for (&k, &c) in counts {
        best = match best {
            None => Some((k, c)),
            Some((bk, bc)) => {
                if c > bc || (c == bc && (k.unsigned_abs(), k) < (bk.unsigned_abs(), bk)) {
                    Some((k, c))
                } else {
                    Some((bk, bc))
                }
            }
        };
    }
    best.expect("at least one key").0
}

/// Repeated random-split least-squares fit of the fusion weights. Each
/// parameter is rounded to `cfg.decimals` places per split and the most
/// frequent rounded value across splits is chosen. The scale factors are
/// taken from `scales`.
pub fn fit_params<T: Scalar>(
    scores: &[(T, T)],
    subjective: &[T],
    cfg: &FitConfig,
    scales: &FusionParams<T>,
) -> Result<FitReport<T>, FusionError> {
    if scores.len() != subjective.len() {
        return Err(FusionError::LengthMismatch(scores.len(), subjective.len()));
    }
    if scores.len() < MIN_FIT_SAMPLES {
        return Err(FusionError::TooFewSamples {
            found: scores.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    if cfg.n_splits == 0 || !(cfg.train_frac > 0.0 && cfg.train_frac < 1.0) {
        return Err(FusionError::InvalidParams("need n_splits > 0 and 0 < train_frac < 1".into()));
    }
    scales.validate()?;
    let rows: Vec<[T; 3]> = scores
        .iter()
        .map(|&(s, t)| [s * scales.spatial_scale, t * scales.temporal_scale, T::one()])
        .collect();
    if is_constant(subjective.iter().copied()) {
        return Err(FusionError::DegenerateDesign("subjective scores are constant".into()));
    }
    if is_constant(rows.iter().map(|r| r[0])) {
        return Err(FusionError::DegenerateDesign("spatial column is constant".into()));
    }
    if is_constant(rows.iter().map(|r| r[1])) {
        return Err(FusionError::DegenerateDesign("temporal column is constant".into()));
    }
    if least_squares(&rows, subjective).is_none() {
        return Err(FusionError::DegenerateDesign("spatial and temporal columns are collinear".into()));
    }

    let n = rows.len();
    let n_train = ((n as f64 * cfg.train_frac).round() as usize).clamp(3, n - 1);
    let factor = 10f64.powi(cfg.decimals as i32);
    let per_split: Vec<(SplitFit<T>, Option<[i64; 3]>)> = (0..cfg.n_splits)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64 + 1);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let (train, test) = order.split_at(n_train);
            let tr_rows: Vec<[T; 3]> = train.iter().map(|&i| rows[i]).collect();
            let tr_y: Vec<T> = train.iter().map(|&i| subjective[i]).collect();
            let Some(raw) = least_squares(&tr_rows, &tr_y) else {
                return (
                    SplitFit {
                        raw: None,
                        rounded: None,
                        pcc: None,
                    },
                    None,
                );
            };
            let keys = raw.map(|v| (v.to_f64_lossy() * factor).round() as i64);
            let rounded = keys.map(|k| T::lit(k as f64 / factor));
            let pred: Vec<T> = test
                .iter()
                .map(|&i| raw[0] * rows[i][0] + raw[1] * rows[i][1] + raw[2])
                .collect();
            let obs: Vec<T> = test.iter().map(|&i| subjective[i]).collect();
            (
                SplitFit {
                    raw: Some(raw),
                    rounded: Some(rounded),
                    pcc: pearson(&pred, &obs),
                },
                Some(keys),
            )
        })
        .collect();

    let mut counts: [BTreeMap<i64, usize>; 3] = Default::default();
    for keys in per_split.iter().filter_map(|(_, k)| *k) {
        for (c, k) in counts.iter_mut().zip(keys) {
            *c.entry(k).or_default() += 1;
        }
    }
    if counts[0].is_empty() {
        return Err(FusionError::DegenerateDesign("every training split was singular".into()));
    }
    let chosen = counts
        .iter()
        .map(|c| T::lit(mode_key(c) as f64 / factor))
        .collect::<Vec<_>>();
    let histograms = counts.map(|c| {
        c.into_iter()
            .map(|(k, count)| HistogramBin {
                value: T::lit(k as f64 / factor),
                count,
            })
            .collect()
    });
    Ok(FitReport {
        chosen: FusionParams {
            w_s: chosen[0],
            w_t: chosen[1],
            gamma: chosen[2],
            ..*scales
        },
        per_split: per_split.into_iter().map(|(s, _)| s).collect(),
        histograms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fused_value_examples() {
        let p = FusionParams::<f64>::default();
        let v = st_vqm(1e-10, 1e-5, &p);
        assert!((v - 3.11).abs() < 1e-12, "{v}");
        assert_eq!(st_vqm(0.0, 0.0, &p), 3.26);
        let lin = FusionParams::with_weights(0.5, 0.0, 0.0);
        assert_eq!(st_vqm(4e-10, 7.0, &lin), 2.0 * st_vqm(2e-10, 7.0, &lin));
    }

    #[test]
    fn mode_tie_breaks_toward_small_magnitude() {
        let c: BTreeMap<i64, usize> = [(-3, 2), (2, 2), (5, 1)].into_iter().collect();
        assert_eq!(mode_key(&c), 2);
        let c: BTreeMap<i64, usize> = [(-2, 2), (2, 2)].into_iter().collect();
        assert_eq!(mode_key(&c), -2);
    }

    fn linear_data() -> (Vec<(f64, f64)>, Vec<f64>) {
        let scores: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let s = (i % 7) as f64 * 0.5e-10;
                let t = ((i * 3) % 5) as f64 * 0.4e-5;
                (s, t)
            })
            .collect();
        let y = scores.iter().map(|&(s, t)| 0.3 * s * 1e10 - 0.4 * t * 1e5 + 3.0).collect();
        (scores, y)
    }

    #[test]
    fn recovers_linear_parameters() {
        let (x, y) = linear_data();
        let cfg = FitConfig {
            n_splits: 50,
            ..FitConfig::default()
        };
        let r = fit_params(&x, &y, &cfg, &FusionParams::default()).unwrap();
        assert!((r.chosen.w_s - 0.30).abs() < 1e-9);
        assert!((r.chosen.w_t + 0.40).abs() < 1e-9);
        assert!((r.chosen.gamma - 3.00).abs() < 1e-9);
        assert_eq!(r.per_split.len(), 50);
        assert!(r.histograms.iter().all(|h| h.len() == 1 && h[0].count == 50));
    }

    #[test]
    fn degenerate_inputs() {
        let (x, _) = linear_data();
        let y = vec![3.0; x.len()];
        assert!(matches!(
            fit_params(&x, &y, &FitConfig::default(), &FusionParams::default()),
            Err(FusionError::DegenerateDesign(_))
        ));
        let x2: Vec<(f64, f64)> = x.iter().map(|&(s, _)| (s, 1.0)).collect();
        let (_, y) = linear_data();
        assert!(matches!(
            fit_params(&x2, &y, &FitConfig::default(), &FusionParams::default()),
            Err(FusionError::DegenerateDesign(_))
        ));
        assert!(fit_params(&x[..5], &y[..5], &FitConfig::default(), &FusionParams::default()).is_err());
    }
}
