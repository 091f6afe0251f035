//! Householder QR.

use super::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Thin Householder factorization `A = QR` of an `m x k` matrix, `m >= k`.
///
/// Never fails: for rank-deficient input `Q` still has orthonormal columns
/// and `R` carries (near-)zero diagonal entries. The diagonal of `R` is made
/// nonnegative by flipping signs of matching `Q` columns and `R` rows.
pub fn householder_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (m, k) = a.shape();
    assert!(m >= k, "householder_qr needs rows >= cols, got {m}x{k}");
    let mut cols = a.to_columns();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);

    for j in 0..k {
        let x = &cols[j][j..];
        let alpha = norm2(x);
        let mut v = x.to_vec();
        if alpha > 0.0 {
            let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
            v[0] += sign * alpha;
            let vn = norm2(&v);
            v.iter_mut().for_each(|t| *t /= vn);
        } else {
            // zero column: identity reflector
            v.iter_mut().for_each(|t| *t = 0.0);
        }
        for c in cols.iter_mut().skip(j) {
            let tail = &mut c[j..];
            let proj = 2.0 * dot(&v, tail);
            if proj != 0.0 {
                axpy(-proj, &v, tail);
            }
        }
        reflectors.push(v);
    }

    let mut r = DenseMatrix::zeros(k, k);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..=j {
            r.data_mut()[i * k + j] = c[i];
        }
    }

    // Q = H_0 H_1 ... H_{k-1} applied to the first k unit vectors
    let mut q_cols: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            e
        })
        .collect();
    for j in (0..k).rev() {
        let v = &reflectors[j];
        for q in q_cols.iter_mut() {
            let tail = &mut q[j..];
            let proj = 2.0 * dot(v, tail);
            if proj != 0.0 {
                axpy(-proj, v, tail);
            }
        }
    }

    for i in 0..k {
        if r.get(i, i) < 0.0 {
            for t in r.row_mut(i) {
                *t = -*t;
            }
            for t in q_cols[i].iter_mut() {
                *t = -*t;
            }
        }
    }
    (DenseMatrix::from_columns(m, &q_cols), r)
}

/// Thin QR with a full-column-rank check.
///
/// Fails with [`Error::RankDeficient`] when a diagonal entry of `R` falls
/// below `1e-12 * ‖A‖_F`.
pub fn qr_thin(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, k) = a.shape();
    if m < k {
        return Err(Error::InvalidDimensions(format!(
            "qr_thin needs rows >= cols, got {m}x{k}"
        )));
    }
    let (q, r) = householder_qr(a);
    let threshold = 1e-12 * a.fro_norm();
    if let Some(column) = (0..k).find(|&i| r.get(i, i) <= threshold) {
        return Err(Error::RankDeficient { column });
    }
    Ok((q, r))
}

/// Orthonormal basis for the column space, no rank check.
pub(super) fn orthonormalize(a: &DenseMatrix) -> DenseMatrix {
    householder_qr(a).0
}
