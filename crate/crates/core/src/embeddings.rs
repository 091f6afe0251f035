//! Constructive randomized approximants.
//!
//! Both constructions start from the split `X = ŨṼᵀ` with `Ũ = UΣ^{1/2}` and
//! `Ṽ = VΣ^{1/2}` taken from the thin SVD at numerical rank `k`, and compress
//! the inner dimension with a random `k x r` matrix `Q`:
//!
//! * [`jl_approximant`]: `Q` has orthonormal columns (QR of a Gaussian) and
//!   `Y = (k/r)(ŨQ)(ṼQ)ᵀ`;
//! * [`hw_approximant`]: `Q` has i.i.d. entries `r^{-1/2} ξ` for a centered
//!   sub-Gaussian `ξ` and `Y = (ŨQ)(ṼQ)ᵀ / E|ξ|²`.
//!
//! The existence statements behind them are realized as best-of-`t` search
//! over independent draws. Trial `t` uses the substream `rng.fork(t)`.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{diagnose_with_svd, thm4_bound, thm8_bound, FlaggedBound, MatrixDiagnostics};
use crate::error::{Error, Result};
use crate::matcore::{qr_thin, scale_columns, svd_dense, DenseMatrix, LowRankFactors};
use crate::rng::Rng;

pub const DEFAULT_TRIALS: usize = 10;

/// `Ũ = U_k Σ_k^{1/2}` and `Ṽ = V_k Σ_k^{1/2}`, so that `X(i,j) = ũᵢᵀṽⱼ`.
#[derive(Debug, Clone)]
pub struct SplitFactors {
    pub utilde: DenseMatrix,
    pub vtilde: DenseMatrix,
}

impl SplitFactors {
    pub fn rank(&self) -> usize {
        self.utilde.cols()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.utilde
            .matmul_t(&self.vtilde)
            .expect("split factors share their inner dimension")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubGaussian {
    Rademacher,
    Gaussian,
}

impl SubGaussian {
    /// `E|ξ|²`.
    pub fn second_moment(self) -> f64 {
        1.0
    }

    fn draw(self, rng: &mut Rng) -> f64 {
        match self {
            SubGaussian::Rademacher => rng.rademacher(),
            SubGaussian::Gaussian => rng.normal(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructReport {
    /// `‖X − Y‖_max` of the returned `Y`.
    pub achieved_error: f64,
    pub theoretical_bound: f64,
    pub bound_valid: bool,
    pub bound_eps: f64,
    pub trials_used: usize,
    pub best_trial: usize,
    pub best_seed: u64,
    /// Error of every non-degenerate trial, in trial order.
    pub trial_errors: Vec<f64>,
    /// Draws rejected because `Q` was rank deficient.
    pub degenerate_draws: usize,
}

impl ConstructReport {
    /// Running minimum of `trial_errors`.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.trial_errors
            .iter()
            .scan(f64::INFINITY, |best, &e| {
                *best = best.min(e);
                Some(*best)
            })
            .collect()
    }
}

fn split_from_svd(svd: &LowRankFactors, k: usize) -> SplitFactors {
    let root: Vec<f64> = svd.s[..k].iter().map(|s| s.sqrt()).collect();
    SplitFactors {
        utilde: scale_columns(&svd.u.leading_columns(k), &root),
        vtilde: scale_columns(&svd.v.leading_columns(k), &root),
    }
}

pub fn split_factors(x: &DenseMatrix, rank_tol: f64) -> Result<SplitFactors> {
    if x.max_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let svd = svd_dense(x)?;
    let k = svd.numerical_rank(rank_tol).max(1);
    Ok(split_from_svd(&svd, k))
}

struct Prepared {
    split: SplitFactors,
    diag: MatrixDiagnostics,
}

fn prepare(x: &DenseMatrix, r: usize, trials: usize) -> Result<Prepared> {
    if x.max_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let svd = svd_dense(x)?;
    let diag = diagnose_with_svd(x, svd.clone(), crate::diagnostics::DEFAULT_RANK_TOL)?;
    let k = diag.rank;
    if r == 0 || r > k {
        return Err(Error::InvalidRank { rank: r, max: k });
    }
    Ok(Prepared {
        split: split_from_svd(&svd, k),
        diag,
    })
}

/// Shared best-of-trials loop; `draw_q` returns `None` for a degenerate draw.
fn best_of_trials(
    x: &DenseMatrix,
    split: &SplitFactors,
    scale: f64,
    trials: usize,
    rng: &Rng,
    bound: FlaggedBound,
    mut draw_q: impl FnMut(&mut Rng) -> Option<DenseMatrix>,
) -> Result<(LowRankFactors, ConstructReport)> {
    let mut best: Option<(f64, usize, u64, DenseMatrix, DenseMatrix)> = None;
    let mut trial_errors = Vec::with_capacity(trials);
    let mut degenerate = 0;
    for t in 0..trials {
        let mut sub = rng.fork(t as u64);
        let seed = sub.seed();
        let Some(q) = draw_q(&mut sub) else {
            degenerate += 1;
            continue;
        };
        let a = split.utilde.matmul(&q)?;
        let b = split.vtilde.matmul(&q)?;
        let y = a.matmul_t(&b)?.scale(scale);
        let err = x.max_abs_diff(&y)?;
        trial_errors.push(err);
        if best.as_ref().is_none_or(|(e, ..)| err < *e) {
            best = Some((err, t, seed, a, b));
        }
    }
    let (err, best_trial, best_seed, a, b) = best.ok_or(Error::NoConvergence {
        what: "randomized construction (every draw degenerate)",
        iterations: trials,
    })?;
    let y = LowRankFactors::from_product(&a, &b, scale)?;
    Ok((
        y,
        ConstructReport {
            achieved_error: err,
            theoretical_bound: bound.bound,
            bound_valid: bound.valid,
            bound_eps: bound.eps,
            trials_used: trials,
            best_trial,
            best_seed,
            trial_errors,
            degenerate_draws: degenerate,
        },
    ))
}

/// Orthonormal random projection: `Y = (k/r)(ŨQ)(ṼQ)ᵀ`, best of `trials`.
pub fn jl_approximant(
    x: &DenseMatrix,
    r: usize,
    trials: usize,
    rng: &Rng,
) -> Result<(LowRankFactors, ConstructReport)> {
    let prep = prepare(x, r, trials)?;
    let k = prep.split.rank();
    let bound = thm4_bound(&prep.diag, r);
    best_of_trials(
        x,
        &prep.split,
        k as f64 / r as f64,
        trials,
        rng,
        bound,
        |sub| qr_thin(&sub.gaussian_matrix(k, r, 1.0)).ok().map(|(q, _)| q),
    )
}

/// Sub-Gaussian projection: `Y = (ŨQ)(ṼQ)ᵀ / E|ξ|²`, `Q(i,j) = r^{-1/2} ξ`.
///
/// The reported bound uses the sub-Gaussian constant `c` (unknown in theory;
/// see [`crate::diagnostics::DEFAULT_THM8_C`]).
pub fn hw_approximant(
    x: &DenseMatrix,
    r: usize,
    dist: SubGaussian,
    trials: usize,
    rng: &Rng,
    c: f64,
) -> Result<(LowRankFactors, ConstructReport)> {
    let prep = prepare(x, r, trials)?;
    let k = prep.split.rank();
    let bound = thm8_bound(&prep.diag, r, c);
    let entry_scale = 1.0 / (r as f64).sqrt();
    best_of_trials(
        x,
        &prep.split,
        1.0 / dist.second_moment(),
        trials,
        rng,
        bound,
        |sub| {
            let data = (0..k * r).map(|_| entry_scale * dist.draw(sub)).collect();
            let q = DenseMatrix::from_parts(k, r, data);
            // full column rank is required for rank(Y) = r
            qr_thin(&q).ok().map(|_| q)
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub holds: bool,
    pub error: f64,
    /// `error / bound` (0 when both vanish, infinite for a zero bound).
    pub ratio: f64,
}

pub fn verify_construction(x: &DenseMatrix, y: &LowRankFactors, bound: f64) -> Result<Verification> {
    if (y.rows(), y.cols()) != x.shape() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: (y.rows(), y.cols()),
        });
    }
    let error = x.max_abs_diff(&y.to_dense())?;
    let ratio = if bound > 0.0 {
        error / bound
    } else if error == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Verification {
        holds: error <= bound,
        error,
        ratio,
    })
}
