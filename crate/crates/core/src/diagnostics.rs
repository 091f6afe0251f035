//! Matrix quality metrics (spikiness, coherence, numerical rank) and the
//! closed-form distance bounds.
//!
//! Bounds evaluated here, for `X` of size `m x n` with numerical rank `k`,
//! coherences `μ_col`, `μ_row` and spikiness `γ = √(mn)‖X‖_max/‖X‖₂`:
//!
//! * ultimate: `d_r(X) ≤ ‖X‖_max`;
//! * cross approximation: `√(1 + r/(m−r+1)) √(1 + r/(n−r+1)) σ_{r+1}`;
//! * orthonormal projection: `(ε/3)(kμ_col/m + kμ_row/n + γ/√(mn))‖X‖₂` with
//!   `ε = √(108 log(m+n+1)/r)`;
//! * sub-Gaussian projection: `ε (k/√(mn)) √(μ_col μ_row) ‖X‖₂` with
//!   `ε = √(C log(4mn)/r)` for an unknown absolute constant `C`.
//!
//! Two rank formulas (symmetric PSD and general case) are also provided.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{svd_dense, DenseMatrix, LowRankFactors};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_THM8_C: f64 = 1.0;
const ORTHONORMAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDiagnostics {
    pub m: usize,
    pub n: usize,
    pub max_norm: f64,
    pub spectral_norm: f64,
    pub fro_norm: f64,
    /// Numerical rank `k = #{σ_i > rank_tol σ₁}`.
    pub rank: usize,
    pub spikiness: f64,
    pub mu_col: f64,
    pub mu_row: f64,
    /// Full spectrum, nonincreasing.
    pub singular_values: Vec<f64>,
}

/// A bound value with the flag telling whether its rank/ε window holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedBound {
    pub bound: f64,
    pub eps: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub rank: usize,
    pub ultimate: f64,
    pub cross: f64,
    pub thm4: FlaggedBound,
    pub thm8: FlaggedBound,
    pub thm8_c: f64,
    pub eps: f64,
    pub alon_rank: f64,
    pub udell_rank: u64,
}

/// `(m/k) max_i ‖row_i(Q)‖²` for an orthonormal basis `Q` (m x k).
pub fn coherence(q: &DenseMatrix) -> Result<f64> {
    let (m, k) = q.shape();
    let deviation = q
        .t_matmul(q)?
        .max_abs_diff(&DenseMatrix::identity(k))?;
    if deviation > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let max_row = (0..m)
        .map(|i| q.row(i).iter().map(|x| x * x).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(m as f64 / k as f64 * max_row)
}

pub fn diagnose(x: &DenseMatrix, rank_tol: f64) -> Result<MatrixDiagnostics> {
    if x.max_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    diagnose_with_svd(x, svd_dense(x)?, rank_tol)
}

/// Same as [`diagnose`] given the full thin SVD of `x`.
pub(crate) fn diagnose_with_svd(
    x: &DenseMatrix,
    svd: LowRankFactors,
    rank_tol: f64,
) -> Result<MatrixDiagnostics> {
    let max_norm = x.max_norm();
    if max_norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let (m, n) = x.shape();
    let spectral = svd.s[0];
    let k = svd.numerical_rank(rank_tol).max(1);
    let mu_col = coherence(&svd.u.leading_columns(k))?;
    let mu_row = coherence(&svd.v.leading_columns(k))?;
    let mn = (m as f64 * n as f64).sqrt();
    Ok(MatrixDiagnostics {
        m,
        n,
        max_norm,
        spectral_norm: spectral,
        fro_norm: x.fro_norm(),
        rank: k,
        spikiness: mn * max_norm / spectral,
        mu_col,
        mu_row,
        singular_values: svd.s,
    })
}

/// Cross-approximation bound at rank `r < min(m, n)`.
pub fn cross_bound(singular_values: &[f64], r: usize, m: usize, n: usize) -> Result<f64> {
    let min_dim = m.min(n);
    if r >= min_dim {
        return Err(Error::InvalidRank {
            rank: r,
            max: min_dim.saturating_sub(1),
        });
    }
    let sigma = singular_values.get(r).copied().unwrap_or(0.0);
    let (r, m, n) = (r as f64, m as f64, n as f64);
    Ok((1.0 + r / (m - r + 1.0)).sqrt() * (1.0 + r / (n - r + 1.0)).sqrt() * sigma)
}

pub fn thm4_bound(diag: &MatrixDiagnostics, r: usize) -> FlaggedBound {
    let (m, n, k) = (diag.m as f64, diag.n as f64, diag.rank as f64);
    let k0 = 108.0 * (m + n + 1.0).ln();
    let eps = (k0 / r.max(1) as f64).sqrt();
    let bound = eps / 3.0
        * (k * diag.mu_col / m + k * diag.mu_row / n + diag.spikiness / (m * n).sqrt())
        * diag.spectral_norm;
    FlaggedBound {
        bound,
        eps,
        valid: r >= 1 && eps < 1.0 && r < diag.rank,
    }
}

pub fn thm8_bound(diag: &MatrixDiagnostics, r: usize, c: f64) -> FlaggedBound {
    let (m, n, k) = (diag.m as f64, diag.n as f64, diag.rank as f64);
    let eps = (c * (4.0 * m * n).ln() / r.max(1) as f64).sqrt();
    let bound = eps * k / (m * n).sqrt() * (diag.mu_col * diag.mu_row).sqrt() * diag.spectral_norm;
    FlaggedBound {
        bound,
        eps,
        valid: r >= 1 && c > 0.0 && eps <= 1.0 && r <= diag.rank,
    }
}

/// `9 log(n) / (ε² − ε³)`, rank sufficient for the symmetric PSD case.
pub fn alon_rank(eps: f64, n: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEps(eps));
    }
    Ok(9.0 * n.ln() / (eps * eps - eps * eps * eps))
}

/// `⌈72 log(2 min{m,n} + 1) / ε²⌉`.
///
/// `ε = 1` is accepted as the formal endpoint.
pub fn udell_rank(eps: f64, m: usize, n: usize) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEps(eps));
    }
    let min_dim = m.min(n);
    if min_dim == 0 {
        return Err(Error::InvalidDimensions("min(m, n) must be positive".into()));
    }
    Ok((72.0 * (2.0 * min_dim as f64 + 1.0).ln() / (eps * eps)).ceil() as u64)
}

/// Every bound at rank `r`; the rank formulas use `eps`.
pub fn bound_report(diag: &MatrixDiagnostics, r: usize, thm8_c: f64, eps: f64) -> BoundReport {
    let cross = cross_bound(&diag.singular_values, r, diag.m, diag.n).unwrap_or(0.0);
    BoundReport {
        rank: r,
        ultimate: diag.max_norm,
        cross,
        thm4: thm4_bound(diag, r),
        thm8: thm8_bound(diag, r, thm8_c),
        thm8_c,
        eps,
        alon_rank: alon_rank(eps, diag.n as f64).unwrap_or(f64::NAN),
        udell_rank: udell_rank(eps, diag.m, diag.n).unwrap_or(0),
    }
}
