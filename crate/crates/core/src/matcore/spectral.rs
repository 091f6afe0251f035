use super::matrix::{norm2, DenseMatrix};
use super::svd::svd_dense;
use crate::error::{Error, Result};
use crate::rng::{Rng, DEFAULT_POWER_SEED};

/// Below this smaller dimension the dense SVD is used directly.
pub const DENSE_SPECTRAL_CUTOFF: usize = 64;
const MAX_POWER_ITERS: usize = 20_000;

/// Outcome of power iteration when it runs out of iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// `σ₁(A)` to relative accuracy `tol`.
///
/// Fails with [`Error::NoConvergence`] when the iteration cap is hit; use
/// [`spectral_norm_estimate`] to get the best estimate in that case.
pub fn spectral_norm(a: &DenseMatrix, tol: f64) -> Result<f64> {
    let est = spectral_norm_estimate(a, tol, &mut Rng::new(DEFAULT_POWER_SEED))?;
    if est.converged {
        Ok(est.value)
    } else {
        Err(Error::NoConvergence {
            what: "power iteration",
            iterations: est.iterations,
        })
    }
}

/// Power iteration on `AᵀA` from a seeded Gaussian start.
///
/// Stops once the Aitken-extrapolated distance to the limit drops below
/// `tol * estimate`.
pub fn spectral_norm_estimate(a: &DenseMatrix, tol: f64, rng: &mut Rng) -> Result<SpectralEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidEps(tol));
    }
    if a.rows().min(a.cols()) <= DENSE_SPECTRAL_CUTOFF {
        return Ok(SpectralEstimate {
            value: svd_dense(a)?.s[0],
            converged: true,
            iterations: 0,
        });
    }
    if a.max_norm() == 0.0 {
        return Ok(SpectralEstimate {
            value: 0.0,
            converged: true,
            iterations: 0,
        });
    }

    let mut x: Vec<f64> = (0..a.cols()).map(|_| rng.normal()).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|t| *t /= nx);

    let mut sigma = 0.0;
    let mut prev_delta = f64::INFINITY;
    for it in 1..=MAX_POWER_ITERS {
        let y = a.matvec(&x);
        let next = norm2(&y);
        let mut z = a.t_matvec(&y);
        let nz = norm2(&z);
        if nz == 0.0 {
            // start vector in the null space; restart from a fresh direction
            x = (0..a.cols()).map(|_| rng.normal()).collect();
            let nx = norm2(&x);
            x.iter_mut().for_each(|t| *t /= nx);
            continue;
        }
        z.iter_mut().for_each(|t| *t /= nz);
        x = z;

        let delta = (next - sigma).abs();
        sigma = next;
        let ratio = if prev_delta.is_finite() && prev_delta > 0.0 {
            (delta / prev_delta).min(0.999)
        } else {
            0.999
        };
        let remaining = delta * ratio / (1.0 - ratio);
        if it > 2 && delta <= tol * sigma && remaining <= tol * sigma {
            return Ok(SpectralEstimate {
                value: sigma,
                converged: true,
                iterations: it,
            });
        }
        prev_delta = delta;
    }
    Ok(SpectralEstimate {
        value: sigma,
        converged: false,
        iterations: MAX_POWER_ITERS,
    })
}
