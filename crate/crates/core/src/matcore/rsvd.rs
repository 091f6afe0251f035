//! Randomized range finder with power iterations, followed by a small dense
//! SVD of the projected matrix.

use super::factors::LowRankFactors;
use super::matrix::DenseMatrix;
use super::qr::orthonormalize;
use super::svd::svd_dense;
use crate::error::{Error, Result};
use crate::rng::Rng;

pub const DEFAULT_OVERSAMPLING: usize = 10;
pub const DEFAULT_POWER_ITERS: usize = 2;

/// Rank-`r` truncated SVD of `a` using a Gaussian sketch of width `r + p`
/// and `q` subspace iterations.
///
/// When the sketch would be as wide as the matrix itself the exact dense SVD
/// is truncated instead.
pub fn rsvd_truncate(
    a: &DenseMatrix,
    r: usize,
    p: usize,
    q: usize,
    rng: &mut Rng,
) -> Result<LowRankFactors> {
    Ok(rsvd_subspace(a, r, p, q, rng)?.0)
}

/// [`rsvd_truncate`] that also returns the sketch's right singular vectors as
/// the rows of a `(r + p) x n` matrix, for use with [`subspace_truncate`].
pub fn rsvd_subspace(
    a: &DenseMatrix,
    r: usize,
    p: usize,
    q: usize,
    rng: &mut Rng,
) -> Result<(LowRankFactors, DenseMatrix)> {
    let (m, n) = a.shape();
    let min_dim = m.min(n);
    if r == 0 || r > min_dim {
        return Err(Error::InvalidRank { rank: r, max: min_dim });
    }
    let width = r + p;
    if width >= min_dim {
        return exact(a, r);
    }

    // products with A are formed transposed, as (ΩᵀAᵀ)ᵀ
    let omega_t = rng.gaussian_matrix(width, n, 1.0);
    let mut basis = orthonormalize(&omega_t.matmul_t(a)?.transpose());
    for _ in 0..q {
        let w = orthonormalize(&basis.t_matmul(a)?.transpose());
        basis = orthonormalize(&w.transpose().matmul_t(a)?.transpose());
    }
    project(a, &basis, r)
}

/// Rank-`r` truncated SVD from a guess of the dominant right subspace, given
/// as the orthonormal rows of `vt` (`w x n`, `r <= w`): one block power step
/// `Q = orth(A V)` followed by the SVD of `QᵀA`.
///
/// Returns the factors and the refined `w x n` right basis.
pub fn subspace_truncate(a: &DenseMatrix, vt: &DenseMatrix, r: usize) -> Result<(LowRankFactors, DenseMatrix)> {
    let (m, n) = a.shape();
    let min_dim = m.min(n);
    if r == 0 || r > min_dim {
        return Err(Error::InvalidRank { rank: r, max: min_dim });
    }
    if vt.cols() != n || vt.rows() < r {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: vt.shape(),
        });
    }
    if vt.rows() >= min_dim {
        return exact(a, r);
    }
    let basis = orthonormalize(&vt.matmul_t(a)?.transpose());
    project(a, &basis, r)
}

fn exact(a: &DenseMatrix, r: usize) -> Result<(LowRankFactors, DenseMatrix)> {
    let full = svd_dense(a)?;
    let vt = full.v.transpose();
    Ok((full.truncate(r), vt))
}

/// SVD of `QᵀA` lifted back through `Q`.
fn project(a: &DenseMatrix, basis: &DenseMatrix, r: usize) -> Result<(LowRankFactors, DenseMatrix)> {
    let fb = svd_dense(&basis.t_matmul(a)?)?;
    let vt = fb.v.transpose();
    let fb = fb.truncate(r);
    let factors = LowRankFactors::from_parts_unchecked(basis.matmul(&fb.u)?, fb.s, fb.v);
    Ok((factors, vt))
}
