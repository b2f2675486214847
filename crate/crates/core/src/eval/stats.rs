//! Correlation, error and ROC statistics.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::scalar::Scalar;

pub fn mean<T: Scalar>(x: &[T]) -> T {
    x.iter().copied().sum::<T>() / T::from_usize(x.len()).expect("length representable")
}

/// Pearson correlation; `None` when either input has zero variance.
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    assert_eq!(a.len(), b.len());
    if a.len() < 2 {
        return None;
    }
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = T::zero();
    let mut saa = T::zero();
    let mut sbb = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa <= T::zero() || sbb <= T::zero() {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).max(-T::one()).min(T::one()))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![T::zero(); x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        // positions i..=j share rank (i + j) / 2 + 1
        let r = T::from_usize(i + j).expect("index") / T::lit(2.0) + T::one();
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    pearson(&average_ranks(a), &average_ranks(b))
}

pub fn rmse<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let n = T::from_usize(a.len()).expect("length");
    (a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>() / n).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStats<T> {
    pub pcc: T,
    pub srocc: T,
    pub rmse: T,
}

pub fn correlation_stats<T: Scalar>(mapped: &[T], subjective: &[T]) -> Result<CorrelationStats<T>, EvalError> {
    if mapped.len() != subjective.len() {
        return Err(EvalError::LengthMismatch(mapped.len(), subjective.len()));
    }
    if mapped.len() < 3 {
        return Err(EvalError::TooFewPoints {
            found: mapped.len(),
            required: 3,
        });
    }
    let pcc = pearson(mapped, subjective).ok_or(EvalError::ZeroVariance)?;
    let srocc = spearman(mapped, subjective).ok_or(EvalError::ZeroVariance)?;
    Ok(CorrelationStats {
        pcc,
        srocc,
        rmse: rmse(mapped, subjective),
    })
}

/// Area under the ROC curve for scores of positives versus negatives.
/// Ties between classes count one half (trapezoidal rule); `None` when
/// either class is empty.
pub fn roc_auc<T: Scalar>(positives: &[T], negatives: &[T]) -> Option<T> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let all: Vec<T> = positives.iter().chain(negatives).copied().collect();
    let ranks = average_ranks(&all);
    let np = T::from_usize(positives.len()).expect("count");
    let nn = T::from_usize(negatives.len()).expect("count");
    let rank_sum: T = ranks[..positives.len()].iter().copied().sum();
    let u = rank_sum - np * (np + T::one()) / T::lit(2.0);
    Some(u / (np * nn))
}
