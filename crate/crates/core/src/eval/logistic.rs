//! Four-parameter logistic mapping of objective scores onto the subjective
//! scale, fitted by Levenberg–Marquardt.

use serde::{Deserialize, Serialize};

use super::stats::{mean, pearson};
use super::EvalError;
use crate::linalg::solve;

/// `b1 · (½ − 1 / (1 + exp(b2 · (o − b3)))) + b4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams(pub [f64; 4]);

impl LogisticParams {
    pub fn apply(&self, o: f64) -> f64 {
        let [b1, b2, b3, b4] = self.0;
        b1 * (0.5 - 1.0 / (1.0 + (b2 * (o - b3)).exp())) + b4
    }

    /// Partial derivatives with respect to `b1..b4` at `o`.
    fn gradient(&self, o: f64) -> [f64; 4] {
        let [b1, b2, b3, _] = self.0;
        let g = 1.0 / (1.0 + (b2 * (o - b3)).exp());
        let slope = b1 * g * (1.0 - g);
        [0.5 - g, slope * (o - b3), -slope * b2, 1.0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub params: LogisticParams,
    pub mapped: Vec<f64>,
    pub rmse: f64,
    pub iterations: usize,
}

pub const MIN_LOGISTIC_POINTS: usize = 5;
const MAX_ITER: usize = 2000;

fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn sse(p: &LogisticParams, o: &[f64], s: &[f64]) -> f64 {
    o.iter().zip(s).map(|(&x, &y)| (y - p.apply(x)).powi(2)).sum()
}

/// Initial guess: `b1` = range of subjective, `b2` = ±1 / sd(objective) with
/// the sign of the linear correlation, `b3` = median objective, `b4` = mean
/// subjective.
pub fn initial_params(objective: &[f64], subjective: &[f64]) -> LogisticParams {
    let lo = subjective.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = subjective.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mo = mean(objective);
    let sd = (objective.iter().map(|v| (v - mo).powi(2)).sum::<f64>() / objective.len() as f64).sqrt();
    let sign = match pearson(objective, subjective) {
        Some(r) if r < 0.0 => -1.0,
        _ => 1.0,
    };
    LogisticParams([(hi - lo).max(1e-6), sign / sd, median(objective), mean(subjective)])
}

pub fn logistic_fit(objective: &[f64], subjective: &[f64]) -> Result<LogisticFit, EvalError> {
    if objective.len() != subjective.len() {
        return Err(EvalError::LengthMismatch(objective.len(), subjective.len()));
    }
    if objective.len() < MIN_LOGISTIC_POINTS {
        return Err(EvalError::TooFewPoints {
            found: objective.len(),
            required: MIN_LOGISTIC_POINTS,
        });
    }
    if objective.iter().chain(subjective).any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite);
    }
    if objective.iter().all(|&v| v == objective[0]) {
        return Err(EvalError::ConstantObjective);
    }
    let mut p = initial_params(objective, subjective);
    let mut err = sse(&p, objective, subjective);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (&o, &s) in objective.iter().zip(subjective) {
            let g = p.gradient(o);
            let r = s - p.apply(o);
            for i in 0..4 {
                jtr[i] += g[i] * r;
                for j in 0..4 {
                    jtj[i][j] += g[i] * g[j];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            if let Some(step) = solve(a, jtr) {
                let mut q = p;
                for (v, d) in q.0.iter_mut().zip(step) {
                    *v += d;
                }
                let e = sse(&q, objective, subjective);
                if e.is_finite() && e < err {
                    let gain = err - e;
                    p = q;
                    err = e;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = gain > 1e-15 * err.max(1e-300);
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let rmse = (err / objective.len() as f64).sqrt();
    if p.0.iter().any(|v| !v.is_finite()) || !rmse.is_finite() {
        return Err(EvalError::FitDivergence { rmse });
    }
    Ok(LogisticFit {
        mapped: objective.iter().map(|&o| p.apply(o)).collect(),
        params: p,
        rmse,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_generating_logistic() {
        let truth = LogisticParams([4.0, 1.5, 0.3, 3.0]);
        let o: Vec<f64> = (0..30).map(|i| -2.0 + i as f64 * 0.15).collect();
        let s: Vec<f64> = o.iter().map(|&x| truth.apply(x)).collect();
        let fit = logistic_fit(&o, &s).unwrap();
        assert!(fit.rmse < 1e-3, "{}", fit.rmse);
    }

    #[test]
    fn affine_relationship_maps_with_high_correlation() {
        let o: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let s: Vec<f64> = o.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = logistic_fit(&o, &s).unwrap();
        assert!(pearson(&fit.mapped, &s).unwrap() >= 0.999);
    }

    #[test]
    fn decreasing_relationship() {
        let o: Vec<f64> = (0..15).map(|i| i as f64).collect();
        let s: Vec<f64> = o.iter().map(|x| 5.0 - 0.25 * x).collect();
        let fit = logistic_fit(&o, &s).unwrap();
        assert!(pearson(&fit.mapped, &s).unwrap() >= 0.999);
    }

    #[test]
    fn constant_objective_is_rejected() {
        assert!(matches!(
            logistic_fit(&[1.0; 6], &[1.0, 2.0, 3.0, 4.0, 5.0, 3.0]),
            Err(EvalError::ConstantObjective)
        ));
    }
}
