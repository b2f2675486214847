//! Small dense solves for least-squares fits.

use crate::scalar::Scalar;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `1e-12` of the largest entry.
pub fn solve<T: Scalar, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return None;
    }
    let tiny = scale * T::lit(1e-12);
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= tiny {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Ordinary least squares via the normal equations. `rows` are design rows.
pub fn least_squares<T: Scalar, const N: usize>(rows: &[[T; N]], target: &[T]) -> Option<[T; N]> {
    let mut ata = [[T::zero(); N]; N];
    let mut atb = [T::zero(); N];
    for (r, &y) in rows.iter().zip(target) {
        for i in 0..N {
            atb[i] = atb[i] + r[i] * y;
            for j in 0..N {
                ata[i][j] = ata[i][j] + r[i] * r[j];
            }
        }
    }
    solve(ata, atb)
}
