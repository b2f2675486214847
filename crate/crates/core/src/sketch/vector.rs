use std::ops::Deref;

use super::{SketchError, N_CLASSES};
use crate::scalar::Scalar;

/// Contour-class probabilities `(p_1, …, p_151)`; the last entry is the
/// no-contour class.
#[derive(Debug, Clone, PartialEq)]
pub struct StVector<T> {
    p: Vec<T>,
}

impl<T: Scalar> StVector<T> {
    /// Checks length, component range and unit sum.
    pub fn new(p: Vec<T>) -> Result<Self, SketchError> {
        if p.len() != N_CLASSES {
            return Err(SketchError::NotOnSimplex(format!("length {} != {N_CLASSES}", p.len())));
        }
        let tol = T::simplex_tolerance();
        if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < T::zero() || **v > T::one() + tol) {
            return Err(SketchError::NotOnSimplex(format!("component {bad:?} outside [0, 1]")));
        }
        let sum: T = p.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(SketchError::NotOnSimplex(format!("components sum to {sum:?}")));
        }
        Ok(Self { p })
    }

    /// Completes 150 contour probabilities with the no-contour complement,
    /// floored at zero and renormalized.
    pub fn from_contour_probabilities(contour: &[T]) -> Self {
        assert_eq!(contour.len(), N_CLASSES - 1);
        let mut p = Vec::with_capacity(N_CLASSES);
        p.extend(contour.iter().map(|v| v.max(T::zero())));
        let partial: T = p.iter().copied().sum();
        p.push((T::one() - partial).max(T::zero()));
        let total: T = p.iter().copied().sum();
        if total > T::zero() {
            p.iter_mut().for_each(|v| *v = *v / total);
        }
        Self { p }
    }

    /// One-hot vector for `label` in 1..=151.
    pub fn one_hot(label: usize) -> Self {
        let mut p = vec![T::zero(); N_CLASSES];
        p[label - 1] = T::one();
        Self { p }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn into_inner(self) -> Vec<T> {
        self.p
    }

    /// Most probable label (1-based), first on ties.
    pub fn argmax_label(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.p.iter().enumerate() {
            if *v > self.p[best] {
                best = i;
            }
        }
        best + 1
    }

    /// Probability of the no-contour class.
    pub fn blank(&self) -> T {
        self.p[N_CLASSES - 1]
    }
}

impl<T> Deref for StVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.p
    }
}

impl<T> AsRef<[T]> for StVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.p
    }
}
