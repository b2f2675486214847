//! Kullback–Leibler and Jensen–Shannon divergences between discrete
//! distributions, in nats.

use thiserror::Error;

use crate::scalar::Scalar;

/// Floor applied to the second argument of [`kld`].
pub const KLD_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivergenceError {
    #[error("distributions have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("input is not a probability distribution: {0}")]
    NotOnSimplex(String),
}

fn check_simplex<T: Scalar>(p: &[T]) -> Result<(), DivergenceError> {
    let tol = T::simplex_tolerance();
    if p.is_empty() {
        return Err(DivergenceError::NotOnSimplex("empty".into()));
    }
    if p.iter().any(|v| !v.is_finite() || *v < T::zero()) {
        return Err(DivergenceError::NotOnSimplex("negative or non-finite component".into()));
    }
    let s: T = p.iter().copied().sum();
    if (s - T::one()).abs() > tol {
        return Err(DivergenceError::NotOnSimplex(format!("sum {s:?}")));
    }
    Ok(())
}

fn check_pair<T: Scalar>(p: &[T], q: &[T]) -> Result<(), DivergenceError> {
    if p.len() != q.len() {
        return Err(DivergenceError::DimensionMismatch(p.len(), q.len()));
    }
    check_simplex(p)?;
    check_simplex(q)
}

/// Σ p_i ln(p_i / q_i) with 0 · ln(0 / q) = 0; `q` must be positive wherever
/// `p` is.
fn kld_unchecked<T: Scalar>(p: &[T], q: &[T]) -> T {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > T::zero())
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum()
}

/// Kullback–Leibler divergence D(p ‖ q). `q` is floored at
/// [`KLD_EPSILON`] and renormalized first; a `q` already above the floor is
/// used as given.
pub fn kld<T: Scalar>(p: impl AsRef<[T]>, q: impl AsRef<[T]>) -> Result<T, DivergenceError> {
    let (p, q) = (p.as_ref(), q.as_ref());
    check_pair(p, q)?;
    let eps = T::lit(KLD_EPSILON);
    if q.iter().all(|&v| v >= eps) {
        return Ok(kld_unchecked(p, q).max(T::zero()));
    }
    let floored: Vec<T> = q.iter().map(|v| v.max(eps)).collect();
    let total: T = floored.iter().copied().sum();
    let q: Vec<T> = floored.into_iter().map(|v| v / total).collect();
    Ok(kld_unchecked(p, &q).max(T::zero()))
}

/// Jensen–Shannon divergence ½D(p ‖ m) + ½D(q ‖ m), m = ½(p + q).
///
/// The midpoint covers the support of both inputs, so no floor is needed.
/// Both the midpoint and the final sum are commutative in IEEE arithmetic, so
/// `jsd(p, q)` and `jsd(q, p)` agree bit for bit.
pub fn jsd<T: Scalar>(p: impl AsRef<[T]>, q: impl AsRef<[T]>) -> Result<T, DivergenceError> {
    let (p, q) = (p.as_ref(), q.as_ref());
    check_pair(p, q)?;
    let half = T::lit(0.5);
    let m: Vec<T> = p.iter().zip(q).map(|(&a, &b)| (a + b) * half).collect();
    let v = half * kld_unchecked(p, &m) + half * kld_unchecked(q, &m);
    Ok(v.max(T::zero()).min(T::lit(std::f64::consts::LN_2)))
}
