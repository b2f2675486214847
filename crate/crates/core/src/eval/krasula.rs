//! Pairwise discrimination analysis: how well objective score differences
//! separate significantly different pairs from similar ones, and better
//! from worse sides.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::pairs::{Direction, PairLabel, Significance};
use super::stats::{average_ranks, roc_auc};
use super::EvalError;

/// Scale on which objective differences are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaBasis {
    /// Ranks of the objective scores among all paired ids; the analysis is
    /// then unchanged by any strictly increasing transform of the scores.
    #[default]
    Rank,
    /// Objective scores as given.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrasulaResult {
    /// `None` when either the different or the similar group is empty.
    pub auc_ds: Option<f64>,
    /// `None` when no pair differs significantly.
    pub auc_bw: Option<f64>,
    pub cc: Option<f64>,
    pub n_pairs: usize,
    pub n_different: usize,
}

/// Higher objective scores are taken to mean better quality.
pub fn krasula_analysis(
    pairs: &[PairLabel],
    objective: &HashMap<String, f64>,
    basis: DeltaBasis,
) -> Result<KrasulaResult, EvalError> {
    let mut ids: Vec<&str> = pairs.iter().flat_map(|p| [p.a.as_str(), p.b.as_str()]).collect();
    ids.sort_unstable();
    ids.dedup();
    let raw: Vec<f64> = ids
        .iter()
        .map(|id| objective.get(*id).copied().ok_or_else(|| EvalError::MissingScore((*id).to_string())))
        .collect::<Result<_, _>>()?;
    let values = match basis {
        DeltaBasis::Rank => average_ranks(&raw),
        DeltaBasis::Raw => raw,
    };
    let score: HashMap<&str, f64> = ids.iter().copied().zip(values).collect();

    let mut diff_abs = Vec::new();
    let mut sim_abs = Vec::new();
    let mut better = Vec::new();
    let mut worse = Vec::new();
    let mut correct = 0usize;
    for p in pairs {
        let delta = score[p.a.as_str()] - score[p.b.as_str()];
        match p.significance {
            Significance::Similar => sim_abs.push(delta.abs()),
            Significance::Different => {
                diff_abs.push(delta.abs());
                let d = match p.direction {
                    Direction::ABetter => delta,
                    Direction::BBetter => -delta,
                    Direction::None => {
                        return Err(EvalError::Stats(format!("pair {}/{} differs without a direction", p.a, p.b)))
                    }
                };
                // each pair contributes its better-minus-worse difference and the mirror
                better.push(d);
                worse.push(-d);
                if d > 0.0 {
                    correct += 1;
                }
            }
        }
    }
    let n_different = diff_abs.len();
    Ok(KrasulaResult {
        auc_ds: roc_auc(&diff_abs, &sim_abs),
        auc_bw: roc_auc(&better, &worse),
        cc: (n_different > 0).then(|| correct as f64 / n_different as f64),
        n_pairs: pairs.len(),
        n_different,
    })
}
