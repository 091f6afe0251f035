//! Alternating projections between the max-norm ball `B_ε(X)` and the set of
//! rank-`r` matrices, and bisection over `ε` to bracket `d_r(X)`.
//!
//! The ball projection is entrywise clipping of `Y − X` to `[−ε, ε]`; the
//! rank projection is a randomized truncated SVD. Neither step minimizes the
//! max norm directly, so the error sequence is not monotone in general.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    rsvd_subspace, rsvd_truncate, subspace_truncate, DenseMatrix, LowRankFactors,
    DEFAULT_OVERSAMPLING, DEFAULT_POWER_ITERS,
};
use crate::rng::{derive_seed, Rng};

pub const DEFAULT_MAX_ITER: usize = 2000;
pub const DEFAULT_FEAS_TOL: f64 = 1e-3;
pub const DEFAULT_STALL_WINDOW: usize = 50;
pub const DEFAULT_STALL_TOL: f64 = 1e-4;
/// Absolute feasibility floor, relative to `‖X‖_max`.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_BS_TOL: f64 = 1e-3;
pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `Y₀ = G₁G₂ᵀ` with i.i.d. `N(0, 1/r)` factor entries.
    GaussianProduct,
    WarmStart(LowRankFactors),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApConfig {
    pub eps: f64,
    pub max_iter: usize,
    /// Relative slack on `ε` when declaring feasibility.
    pub feas_tol: f64,
    /// Absolute slack, as a fraction of `‖X‖_max`.
    pub abs_tol: f64,
    pub stall_window: usize,
    /// Minimum relative improvement of the best error over one window.
    pub stall_tol: f64,
    pub oversampling: usize,
    pub power_iters: usize,
    /// After the first rank projection, refine the previous right subspace
    /// with one block power step instead of drawing a fresh sketch.
    pub reuse_subspace: bool,
    pub seed: u64,
    pub init: Init,
}

impl Default for ApConfig {
    fn default() -> Self {
        Self {
            eps: 0.0,
            max_iter: DEFAULT_MAX_ITER,
            feas_tol: DEFAULT_FEAS_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            stall_window: DEFAULT_STALL_WINDOW,
            stall_tol: DEFAULT_STALL_TOL,
            oversampling: DEFAULT_OVERSAMPLING,
            power_iters: DEFAULT_POWER_ITERS,
            reuse_subspace: true,
            seed: 0,
            init: Init::GaussianProduct,
        }
    }
}

impl ApConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidEps(self.eps));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.feas_tol >= 0.0) || !(self.abs_tol >= 0.0) || !(self.stall_tol >= 0.0) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        Ok(())
    }

    /// Largest error accepted as feasible for a matrix with max norm `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.eps * (1.0 + self.feas_tol) + self.abs_tol * scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    Stalled,
    MaxIter,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::Stalled => "stalled",
            StopReason::MaxIter => "max_iter",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApReport {
    pub feasible: bool,
    /// Number of (ball, rank) projection pairs performed.
    pub iterations: usize,
    /// `‖X − Y‖_max` of the last iterate.
    pub final_error: f64,
    /// Error of `Y₀, Y₁, …`.
    pub error_history: Vec<f64>,
    pub stop_reason: StopReason,
    /// Last rank-`r` iterate.
    pub certificate: LowRankFactors,
    pub seed: u64,
}

/// Euclidean projection onto `B_ε(X)`: `X + clamp(Y − X, −ε, ε)`.
pub fn project_ball(y: &DenseMatrix, x: &DenseMatrix, eps: f64) -> Result<DenseMatrix> {
    if y.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            left: y.shape(),
            right: x.shape(),
        });
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidEps(eps));
    }
    let mut z = y.clone();
    for (zi, &xi) in z.data_mut().iter_mut().zip(x.data()) {
        let mut lo = xi - eps;
        let mut hi = xi + eps;
        // keep |z - x| <= eps exact after rounding
        if xi - lo > eps {
            lo = lo.next_up();
        }
        if hi - xi > eps {
            hi = hi.next_down();
        }
        *zi = zi.clamp(lo, hi);
    }
    Ok(z)
}

/// Projection onto rank-`r` matrices via randomized truncated SVD.
pub fn project_rank(z: &DenseMatrix, r: usize, cfg: &ApConfig, rng: &mut Rng) -> Result<LowRankFactors> {
    rsvd_truncate(z, r, cfg.oversampling, cfg.power_iters, rng)
}

fn check_rank(x: &DenseMatrix, r: usize) -> Result<()> {
    let max = x.rows().min(x.cols());
    if r == 0 || r > max {
        return Err(Error::InvalidRank { rank: r, max });
    }
    Ok(())
}

fn initial_guess(x: &DenseMatrix, r: usize, init: &Init, rng: &mut Rng) -> Result<LowRankFactors> {
    match init {
        Init::GaussianProduct => {
            let sd = 1.0 / (r as f64).sqrt();
            let g1 = rng.gaussian_matrix(x.rows(), r, sd);
            let g2 = rng.gaussian_matrix(x.cols(), r, sd);
            LowRankFactors::from_product(&g1, &g2, 1.0)
        }
        Init::WarmStart(y) => {
            if (y.rows(), y.cols()) != x.shape() {
                return Err(Error::ShapeMismatch {
                    left: x.shape(),
                    right: (y.rows(), y.cols()),
                });
            }
            Ok(y.clone().truncate(r))
        }
    }
}

/// One run of alternating projections at radius `cfg.eps`.
///
/// Stops as soon as an iterate is within `cfg.threshold(‖X‖_max)`, when the
/// best error fails to improve by `stall_tol` (relative) over `stall_window`
/// iterations, or after `max_iter` iterations.
pub fn ap_run(x: &DenseMatrix, r: usize, cfg: &ApConfig) -> Result<ApReport> {
    check_rank(x, r)?;
    cfg.validate()?;
    let mut rng = Rng::new(cfg.seed);
    let threshold = cfg.threshold(x.max_norm());

    let mut factors = initial_guess(x, r, &cfg.init, &mut rng)?;
    let mut y = factors.to_dense();
    let mut history = Vec::new();
    let mut best_so_far: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut subspace: Option<DenseMatrix> = None;

    let stop_reason = loop {
        let err = x.max_abs_diff(&y)?;
        history.push(err);
        let best = best_so_far.last().map_or(err, |&b: &f64| b.min(err));
        best_so_far.push(best);

        if err <= threshold {
            break StopReason::Converged;
        }
        if iterations >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        let w = cfg.stall_window;
        if w > 0 && best_so_far.len() > w {
            let before = best_so_far[best_so_far.len() - 1 - w];
            if before - best < cfg.stall_tol * before {
                break StopReason::Stalled;
            }
        }

        let z = project_ball(&y, x, cfg.eps)?;
        let (f, vt) = match &subspace {
            Some(vt) if cfg.reuse_subspace => subspace_truncate(&z, vt, r)?,
            _ => rsvd_subspace(&z, r, cfg.oversampling, cfg.power_iters, &mut rng)?,
        };
        factors = f;
        subspace = Some(vt);
        y = factors.to_dense();
        iterations += 1;
    };

    Ok(ApReport {
        feasible: stop_reason == StopReason::Converged,
        iterations,
        final_error: *history.last().expect("history has the initial error"),
        error_history: history,
        stop_reason,
        certificate: factors,
        seed: cfg.seed,
    })
}

/// One bisection probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub eps: f64,
    pub feasible: bool,
    pub attempts: usize,
    /// The feasible attempt, or the attempt with the lowest final error.
    pub report: ApReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    /// Largest probed `ε` declared infeasible below `eps_plus` (or the lower
    /// end of the initial bracket).
    pub eps_minus: f64,
    /// Upper bound on `d_r(X)` witnessed by `certificate`.
    pub eps_plus: f64,
    pub certificate: LowRankFactors,
    /// `‖X − certificate‖_max`.
    pub certificate_error: f64,
    pub probes: Vec<Probe>,
    /// True when the certificate is the zero matrix.
    pub zero_certificate: bool,
}

/// Bisection settings; `None` bracket ends default to `[0, ‖X‖_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub bs_tol: f64,
    pub restarts: usize,
    pub warm_start: bool,
    /// A known certificate of rank at most `r` and the radius it proves; the
    /// search starts from it instead of the zero matrix.
    pub incumbent: Option<(f64, LowRankFactors)>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            lo: None,
            hi: None,
            bs_tol: DEFAULT_BS_TOL,
            restarts: DEFAULT_RESTARTS,
            warm_start: true,
            incumbent: None,
        }
    }
}

/// Brackets `d_r(X)` by bisection on `ε`.
///
/// Each probe runs up to `restarts` independent [`ap_run`]s (the first seeded
/// from the best certificate when warm starts are on) and is feasible if any
/// of them converges. A feasible probe lowers the upper end to
/// `min(ε, achieved error)`, since the certificate itself proves that value.
/// Search stops when `hi − lo ≤ bs_tol · ‖X‖_max`; if no probe failed by
/// then, the lower end of the bracket is probed as well.
pub fn estimate_distance(
    x: &DenseMatrix,
    r: usize,
    search: &SearchConfig,
    cfg: &ApConfig,
) -> Result<DistanceEstimate> {
    check_rank(x, r)?;
    let scale = x.max_norm();
    let lo0 = search.lo.unwrap_or(0.0);
    let hi0 = search.hi.unwrap_or(scale);
    if !(lo0 >= 0.0) || !(lo0 < hi0) || !hi0.is_finite() {
        return Err(Error::InvalidBracket { lo: lo0, hi: hi0 });
    }
    if search.restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    let (m, n) = x.shape();

    let mut probes: Vec<Probe> = Vec::new();
    let mut probe_index = 0u64;
    let mut run_probe = |eps: f64, warm: Option<&LowRankFactors>, probes: &mut Vec<Probe>| -> Result<Probe> {
        let mut best: Option<ApReport> = None;
        let mut attempts = 0;
        for a in 0..search.restarts {
            let init = match (a, warm) {
                (0, Some(y)) if search.warm_start => Init::WarmStart(y.clone()),
                _ => Init::GaussianProduct,
            };
            let attempt_cfg = ApConfig {
                eps,
                seed: derive_seed(cfg.seed, &[probe_index, a as u64]),
                init,
                ..cfg.clone()
            };
            let report = ap_run(x, r, &attempt_cfg)?;
            attempts += 1;
            let done = report.feasible;
            if done || best.as_ref().is_none_or(|b| report.final_error < b.final_error) {
                best = Some(report);
            }
            if done {
                break;
            }
        }
        probe_index += 1;
        let report = best.expect("at least one attempt");
        let probe = Probe {
            eps,
            feasible: report.feasible,
            attempts,
            report,
        };
        probes.push(probe.clone());
        Ok(probe)
    };

    // the zero matrix always certifies ‖X‖_max
    let mut eps_plus = scale;
    let mut certificate = LowRankFactors::zero(m, n, r);
    let mut certificate_error = scale;
    let mut zero_certificate = true;
    let mut lo = lo0;
    let mut hi = hi0.min(scale);

    if let Some((claimed, y)) = &search.incumbent {
        if (y.rows(), y.cols()) != (m, n) || y.width() > r {
            return Err(Error::ShapeMismatch {
                left: (m, n),
                right: (y.rows(), y.width()),
            });
        }
        let err = x.max_abs_diff(&y.to_dense())?;
        let slack = ApConfig { eps: *claimed, ..cfg.clone() }.threshold(scale);
        let proven = if err <= slack { *claimed } else { err };
        if proven < eps_plus {
            eps_plus = proven;
            certificate_error = err;
            certificate = y.clone();
            zero_certificate = false;
            hi = hi.min(eps_plus);
        }
    }

    if hi < eps_plus {
        let p = run_probe(hi, None, &mut probes)?;
        if p.feasible {
            eps_plus = hi.min(p.report.final_error);
            certificate_error = p.report.final_error;
            certificate = p.report.certificate;
            zero_certificate = false;
            hi = eps_plus;
        } else {
            lo = hi;
            hi = scale;
        }
    }

    while hi - lo > search.bs_tol * scale {
        let mid = 0.5 * (lo + hi);
        let warm = (!zero_certificate).then_some(&certificate);
        let p = run_probe(mid, warm, &mut probes)?;
        if p.feasible {
            let achieved = p.report.final_error;
            let bound = mid.min(achieved);
            if bound < eps_plus {
                eps_plus = bound;
                certificate_error = achieved;
                certificate = p.report.certificate;
                zero_certificate = false;
            }
            hi = eps_plus;
            if hi < lo {
                // a flickering infeasible probe above a certificate: reopen below
                lo = infeasible_below(&probes, eps_plus, lo0);
            }
        } else {
            lo = mid;
        }
    }

    // every probe succeeded: test the floor itself
    if !probes.iter().any(|p| !p.feasible) && eps_plus > lo0 {
        let warm = (!zero_certificate).then_some(&certificate);
        let p = run_probe(lo0, warm, &mut probes)?;
        if p.feasible {
            let achieved = p.report.final_error;
            eps_plus = lo0.max(achieved.min(eps_plus));
            certificate_error = achieved;
            certificate = p.report.certificate;
            zero_certificate = false;
        }
    }

    Ok(DistanceEstimate {
        eps_minus: infeasible_below(&probes, eps_plus, lo0),
        eps_plus,
        certificate,
        certificate_error,
        probes,
        zero_certificate,
    })
}

fn infeasible_below(probes: &[Probe], eps_plus: f64, floor: f64) -> f64 {
    probes
        .iter()
        .filter(|p| !p.feasible && p.eps <= eps_plus)
        .map(|p| p.eps)
        .fold(floor.min(eps_plus), f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn i2() -> DenseMatrix {
        DenseMatrix::identity(2)
    }

    #[test]
    fn ball_projection_examples() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![1.1, 1.95], vec![3.0, 4.05]]).unwrap();
        assert_eq!(project_ball(&y, &x, 0.2).unwrap(), y);
        assert_eq!(project_ball(&y, &x, 0.0).unwrap(), x);
        let zero = DenseMatrix::zeros(1, 2);
        let y = DenseMatrix::from_rows(&[vec![3.0, -0.5]]).unwrap();
        let z = project_ball(&y, &zero, 1.0).unwrap();
        assert_eq!(z.data(), &[1.0, -0.5]);
        assert!(project_ball(&y, &x, 1.0).is_err());
        assert!(project_ball(&y, &zero, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn ball_projection_properties(
            a in prop::collection::vec(-5.0f64..5.0, 12),
            b in prop::collection::vec(-5.0f64..5.0, 12),
            c in prop::collection::vec(-5.0f64..5.0, 12),
            eps in 0.0f64..3.0,
        ) {
            let x = DenseMatrix::new(3, 4, a).unwrap();
            let y1 = DenseMatrix::new(3, 4, b).unwrap();
            let y2 = DenseMatrix::new(3, 4, c).unwrap();
            let p1 = project_ball(&y1, &x, eps).unwrap();
            let p2 = project_ball(&y2, &x, eps).unwrap();
            prop_assert_eq!(project_ball(&p1, &x, eps).unwrap(), p1.clone());
            prop_assert!(p1.max_abs_diff(&x).unwrap() <= eps);
            let d_proj = p1.sub(&p2).unwrap().fro_norm();
            let d_in = y1.sub(&y2).unwrap().fro_norm();
            prop_assert!(d_proj <= d_in + 1e-12);
        }
    }

    #[test]
    fn rank_projection_examples() {
        let cfg = ApConfig::default();
        let mut rng = Rng::new(1);
        let d = DenseMatrix::from_diag(3, 3, &[3.0, 2.0, 1.0]);
        let y = project_rank(&d, 2, &cfg, &mut rng).unwrap().to_dense();
        assert!(y.max_abs_diff(&DenseMatrix::from_diag(3, 3, &[3.0, 2.0, 0.0])).unwrap() < 1e-12);

        let low = rng.gaussian_matrix(30, 3, 1.0).matmul_t(&rng.gaussian_matrix(25, 3, 1.0)).unwrap();
        let y = project_rank(&low, 3, &cfg, &mut rng).unwrap().to_dense();
        assert!(y.max_abs_diff(&low).unwrap() < 1e-8);
        assert!(project_rank(&low, 26, &cfg, &mut rng).is_err());
    }

    #[test]
    fn exact_rank_is_feasible_at_eps_zero() {
        let mut rng = Rng::new(5);
        let x = rng.gaussian_matrix(20, 3, 1.0).matmul_t(&rng.gaussian_matrix(15, 3, 1.0)).unwrap();
        let rep = ap_run(&x, 3, &ApConfig::with_eps(0.0)).unwrap();
        assert!(rep.feasible);
        assert!(rep.iterations <= 3);
        assert!(rep.final_error <= 1e-8);
        assert_eq!(rep.final_error, *rep.error_history.last().unwrap());
    }

    #[test]
    fn identity_two_feasibility() {
        // d_1(I_2) = 1/2
        let mut ok = false;
        for seed in 0..5 {
            let cfg = ApConfig { seed, ..ApConfig::with_eps(0.6) };
            let rep = ap_run(&i2(), 1, &cfg).unwrap();
            ok |= rep.feasible;
            if rep.feasible {
                assert!(rep.certificate.numerical_rank(1e-12) <= 1);
                let err = i2().max_abs_diff(&rep.certificate.to_dense()).unwrap();
                assert!(err <= 0.6 * (1.0 + cfg.feas_tol));
            }
        }
        assert!(ok);
        for seed in 0..5 {
            let cfg = ApConfig { seed, ..ApConfig::with_eps(0.4) };
            let rep = ap_run(&i2(), 1, &cfg).unwrap();
            assert!(!rep.feasible);
            assert!(rep.final_error > 0.4);
            assert_ne!(rep.stop_reason, StopReason::Converged);
        }
    }

    #[test]
    fn identity_two_distance() {
        let search = SearchConfig { bs_tol: 1e-3, ..SearchConfig::default() };
        let est = estimate_distance(&i2(), 1, &search, &ApConfig::default()).unwrap();
        assert!(est.eps_plus >= 0.499 && est.eps_plus <= 0.502, "{}", est.eps_plus);
        assert!(est.eps_minus < est.eps_plus);
        assert!(est.certificate_error <= est.eps_plus * (1.0 + DEFAULT_FEAS_TOL));
    }

    #[test]
    fn exact_rank_distance_is_tiny() {
        let mut rng = Rng::new(8);
        let x = rng.gaussian_matrix(16, 2, 1.0).matmul_t(&rng.gaussian_matrix(16, 2, 1.0)).unwrap();
        let est = estimate_distance(&x, 2, &SearchConfig::default(), &ApConfig::default()).unwrap();
        assert!(est.eps_plus <= 1e-6 * x.max_norm(), "{est:?}");
        assert!(!est.zero_certificate);
    }

    #[test]
    fn incumbent_caps_the_search() {
        let x = i2();
        let half = LowRankFactors::from_product(
            &DenseMatrix::new(2, 1, vec![1.0, 1.0]).unwrap(),
            &DenseMatrix::new(2, 1, vec![1.0, 1.0]).unwrap(),
            0.5,
        )
        .unwrap();
        let cfg = ApConfig::default();
        let search = SearchConfig { incumbent: Some((0.5, half.clone())), ..SearchConfig::default() };
        let est = estimate_distance(&x, 1, &search, &cfg).unwrap();
        assert!(est.eps_plus <= 0.5);
        assert!(!est.zero_certificate);
        // an overstated claim is replaced by the measured error
        let search = SearchConfig { incumbent: Some((0.1, half.clone())), bs_tol: 0.5, ..SearchConfig::default() };
        let est = estimate_distance(&x, 1, &search, &cfg).unwrap();
        assert!(est.eps_plus <= 0.5 && est.eps_plus > 0.1);
        let wide = LowRankFactors::zero(2, 2, 2);
        let search = SearchConfig { incumbent: Some((1.0, wide)), ..SearchConfig::default() };
        assert!(estimate_distance(&x, 1, &search, &cfg).is_err());
    }

    #[test]
    fn bracket_errors_and_zero_fallback() {
        let x = i2();
        let cfg = ApConfig::default();
        let bad = SearchConfig { lo: Some(0.8), hi: Some(0.5), ..SearchConfig::default() };
        assert!(matches!(estimate_distance(&x, 1, &bad, &cfg), Err(Error::InvalidBracket { .. })));
        let neg = SearchConfig { lo: Some(-1.0), ..SearchConfig::default() };
        assert!(estimate_distance(&x, 1, &neg, &cfg).is_err());

        // hi below the distance: the bracket reopens up to the zero certificate
        let low_hi = SearchConfig { hi: Some(0.3), bs_tol: 1e-2, ..SearchConfig::default() };
        let est = estimate_distance(&x, 1, &low_hi, &cfg).unwrap();
        assert!(est.eps_plus >= 0.49 && est.eps_plus <= 0.52, "{}", est.eps_plus);
        assert!(est.eps_minus >= 0.3);
    }

    #[test]
    fn certificates_are_valid() {
        let x = Rng::new(2).gaussian_matrix(12, 10, 1.0);
        let search = SearchConfig { bs_tol: 1e-2, restarts: 2, ..SearchConfig::default() };
        let est = estimate_distance(&x, 3, &search, &ApConfig::default()).unwrap();
        let err = x.max_abs_diff(&est.certificate.to_dense()).unwrap();
        assert!((err - est.certificate_error).abs() < 1e-12);
        assert!(err <= est.eps_plus * (1.0 + DEFAULT_FEAS_TOL) + 1e-12);
        assert!(est.certificate.numerical_rank(1e-12) <= 3);
        assert!(est.eps_plus <= x.max_norm());
        assert!(est.eps_minus <= est.eps_plus);
        for p in est.probes.iter().filter(|p| p.feasible) {
            assert!(p.report.final_error <= p.eps * (1.0 + DEFAULT_FEAS_TOL) + 1e-12 * x.max_norm());
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let x = Rng::new(4).gaussian_matrix(10, 10, 1.0);
        let search = SearchConfig { bs_tol: 1e-2, restarts: 2, ..SearchConfig::default() };
        let cfg = ApConfig { seed: 9, ..ApConfig::default() };
        let a = estimate_distance(&x, 2, &search, &cfg).unwrap();
        let b = estimate_distance(&x, 2, &search, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
