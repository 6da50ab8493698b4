//! Small dense complex-matrix helpers shared by the network operations.
//!
//! All matrices in this crate are `nalgebra::DMatrix<Complex64>` at port
//! counts of a few tens, so plain LU and SVD are entirely adequate. Singular
//! systems are rejected against a condition-number cap instead of silently
//! falling back to a pseudo-inverse.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{NetError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Condition-number cap above which a matrix is treated as singular.
///
/// Beyond roughly 1e12 a double-precision inverse can no longer support the
/// 1e-9 relative agreement the cross-route checks demand.
pub const DEFAULT_COND_CAP: f64 = 1e12;

/// Largest singular value (spectral norm). Zero-sized matrices have norm 0.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Ratio of the largest to the smallest singular value, `inf` if rank
/// deficient to working precision.
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse guarded by a condition-number cap.
///
/// Returns the inverse together with the estimated condition number; the
/// caller maps the error into its own singular-* variant.
pub fn checked_inverse(m: &CMatrix, cond_cap: f64) -> std::result::Result<(CMatrix, f64), f64> {
    if m.is_empty() {
        return Ok((m.clone(), 1.0));
    }
    let cond = condition_number(m);
    if !cond.is_finite() || cond > cond_cap {
        return Err(cond);
    }
    match m.clone().try_inverse() {
        Some(inv) => Ok((inv, cond)),
        None => Err(f64::INFINITY),
    }
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative Frobenius distance `|a - b| / max(|a|, floor)`.
pub fn rel_fro_err(a: &CMatrix, b: &CMatrix) -> f64 {
    let denom = fro_norm(a).max(1e-300);
    fro_norm(&(a - b)) / denom
}

/// Largest absolute entry of `m - m^T`, normalized by the largest absolute
/// entry of `m` (0 for an empty or all-zero matrix).
pub fn rel_asymmetry(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    worst / scale
}

/// Complex identity matrix.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(NetError::NonFiniteEntry { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Select the sub-matrix with the given (already validated) row/column
/// index lists, in the order given.
pub fn submatrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_norm_of_scaled_identity() {
        let m = identity(3).map(|z| z * c(2.5, 0.0));
        assert!((spectral_norm(&m) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn checked_inverse_rejects_singular() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(checked_inverse(&m, DEFAULT_COND_CAP).is_err());
    }

    #[test]
    fn checked_inverse_roundtrip() {
        let m = CMatrix::from_row_slice(2, 2, &[c(3.0, 1.0), c(0.5, 0.0), c(0.5, 0.0), c(2.0, -1.0)]);
        let (inv, cond) = checked_inverse(&m, DEFAULT_COND_CAP).unwrap();
        let prod = &m * &inv;
        assert!(rel_fro_err(&identity(2), &prod) < 1e-14);
        assert!(cond >= 1.0);
    }

    #[test]
    fn asymmetry_measure() {
        let sym = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(2.0, 1.0), c(3.0, 0.0)]);
        assert_eq!(rel_asymmetry(&sym), 0.0);
        let asym = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert!(rel_asymmetry(&asym) > 0.1);
    }
}
