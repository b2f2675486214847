//! Subjective pair labels: which sequence pairs differ significantly and
//! which side was preferred.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::manifest::{DatasetManifest, ManifestEntry};
use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Significance {
    Different,
    Similar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    ABetter,
    BBetter,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairLabel {
    pub a: String,
    pub b: String,
    pub significance: Significance,
    pub direction: Direction,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingRule {
    /// Entries sharing source, baseline and rate point but rendered along
    /// different trajectories.
    #[default]
    SameSrcBaselineRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Two-sided Welch (unequal-variance) two-sample t-test.
///
/// When both samples have zero variance the p-value is 1 for equal means and
/// 0 otherwise.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchResult, EvalError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(EvalError::TooFewPoints {
            found: a.len().min(b.len()),
            required: 2,
        });
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let (t, p) = if ma == mb { (0.0, 1.0) } else { ((ma - mb).signum() * f64::INFINITY, 0.0) };
        return Ok(WelchResult {
            t,
            df: na + nb - 2.0,
            p_value: p,
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| EvalError::Stats(e.to_string()))?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(WelchResult { t, df, p_value })
}

pub fn classify_pair(a: &ManifestEntry, b: &ManifestEntry, alpha: f64) -> Result<PairLabel, EvalError> {
    let ra = a.raw_scores.as_ref().ok_or_else(|| EvalError::MissingRawScores(a.id.clone()))?;
    let rb = b.raw_scores.as_ref().ok_or_else(|| EvalError::MissingRawScores(b.id.clone()))?;
    let w = welch_t_test(ra, rb)?;
    let (significance, direction) = if w.p_value < alpha {
        let d = if w.t > 0.0 { Direction::ABetter } else { Direction::BBetter };
        (Significance::Different, d)
    } else {
        (Significance::Similar, Direction::None)
    };
    Ok(PairLabel {
        a: a.id.clone(),
        b: b.id.clone(),
        significance,
        direction,
        p_value: w.p_value,
    })
}

/// Labels every pair selected by `rule`. Within a group, entries are ordered
/// by trajectory label and then id, and each unordered pair appears once.
pub fn classify_pairs(manifest: &DatasetManifest, rule: PairingRule, alpha: f64) -> Result<Vec<PairLabel>, EvalError> {
    let PairingRule::SameSrcBaselineRate = rule;
    let mut groups: BTreeMap<(&str, &str, &str), Vec<&ManifestEntry>> = BTreeMap::new();
    for e in &manifest.entries {
        groups
            .entry((e.src.as_str(), e.hrc_baseline.as_str(), e.hrc_rp.as_str()))
            .or_default()
            .push(e);
    }
    let mut out = Vec::new();
    for members in groups.values_mut() {
        members.sort_by(|x, y| (x.hrt.as_str(), x.id.as_str()).cmp(&(y.hrt.as_str(), y.id.as_str())));
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if members[i].hrt != members[j].hrt {
                    out.push(classify_pair(members[i], members[j], alpha)?);
                }
            }
        }
    }
    Ok(out)
}
