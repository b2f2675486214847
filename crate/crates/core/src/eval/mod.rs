//! Benchmarking objective scores against subjective ratings.

pub mod krasula;
pub mod logistic;
pub mod manifest;
pub mod pairs;
pub mod stats;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use krasula::{krasula_analysis, DeltaBasis, KrasulaResult};
pub use logistic::{logistic_fit, LogisticFit, LogisticParams};
pub use manifest::{DatasetManifest, ManifestEntry};
pub use pairs::{classify_pair, classify_pairs, welch_t_test, Direction, PairLabel, PairingRule, Significance, WelchResult};
pub use stats::{average_ranks, correlation_stats, pearson, rmse, roc_auc, spearman, CorrelationStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {required} points, got {found}")]
    TooFewPoints { found: usize, required: usize },
    #[error("input has zero variance")]
    ZeroVariance,
    #[error("objective scores are constant")]
    ConstantObjective,
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("logistic fit diverged (residual RMSE {rmse})")]
    FitDivergence { rmse: f64 },
    #[error("entry {0} has no raw observer scores")]
    MissingRawScores(String),
    #[error("no objective score for entry {0}")]
    MissingScore(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{0}")]
    Io(String),
    #[error("statistics: {0}")]
    Stats(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub alpha: f64,
    pub pairing: PairingRule,
    pub delta_basis: DeltaBasis,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            pairing: PairingRule::default(),
            delta_basis: DeltaBasis::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub pcc: f64,
    pub srocc: f64,
    pub rmse: f64,
    pub logistic_params: [f64; 4],
    pub auc_ds: Option<f64>,
    pub auc_bw: Option<f64>,
    pub cc: Option<f64>,
    pub n_pairs: usize,
    pub n_different: usize,
}

/// Logistic mapping, correlation statistics and, when the manifest carries
/// observer scores, the pairwise analysis on the mapped scores.
pub fn evaluate(
    manifest: &DatasetManifest,
    objective: &HashMap<String, f64>,
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let obj: Vec<f64> = manifest
        .entries
        .iter()
        .map(|e| objective.get(&e.id).copied().ok_or_else(|| EvalError::MissingScore(e.id.clone())))
        .collect::<Result<_, _>>()?;
    let mos: Vec<f64> = manifest.entries.iter().map(|e| e.mos).collect();
    let fit = logistic_fit(&obj, &mos)?;
    let st = correlation_stats(&fit.mapped, &mos)?;
    let (pairs_result, n_pairs) = if manifest.entries.iter().any(|e| e.raw_scores.is_some()) {
        let pairs = classify_pairs(manifest, cfg.pairing, cfg.alpha)?;
        let mapped: HashMap<String, f64> = manifest
            .entries
            .iter()
            .zip(&fit.mapped)
            .map(|(e, &v)| (e.id.clone(), v))
            .collect();
        (Some(krasula_analysis(&pairs, &mapped, cfg.delta_basis)?), pairs.len())
    } else {
        (None, 0)
    };
    Ok(EvalReport {
        n: obj.len(),
        pcc: st.pcc,
        srocc: st.srocc,
        rmse: st.rmse,
        logistic_params: fit.params.0,
        auc_ds: pairs_result.and_then(|k| k.auc_ds),
        auc_bw: pairs_result.and_then(|k| k.auc_bw),
        cc: pairs_result.and_then(|k| k.cc),
        n_pairs,
        n_different: pairs_result.map_or(0, |k| k.n_different),
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

impl EvalReport {
    /// Aligned plain-text table with one row per metric.
    pub fn table(&self, name: &str) -> String {
        let header = ["Metric", "PCC", "SCC", "RMSE", "AUC-DS", "AUC-BW", "CC"];
        let row = [
            name.to_string(),
            cell(Some(self.pcc)),
            cell(Some(self.srocc)),
            cell(Some(self.rmse)),
            cell(self.auc_ds),
            cell(self.auc_bw),
            cell(self.cc),
        ];
        let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
        let mut out = String::new();
        for (i, h) in header.iter().enumerate() {
            let _ = write!(out, "{}{:>w$}", if i > 0 { "  " } else { "" }, h, w = widths[i]);
        }
        out.push('\n');
        for (i, r) in row.iter().enumerate() {
            let _ = write!(out, "{}{:>w$}", if i > 0 { "  " } else { "" }, r, w = widths[i]);
        }
        out.push('\n');
        out
    }
}
