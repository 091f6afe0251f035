//! Sweep execution.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::spec::{SweepAxis, SweepSpec};
use super::stats::{aggregate, Summary};
use crate::apsolve::{estimate_distance, SearchConfig};
use crate::diagnostics::{bound_report, diagnose, BoundReport};
use crate::error::Result;
use crate::matcore::{DenseMatrix, LowRankFactors};
use crate::rng::derive_seed;

const MATRIX_STREAM: u64 = 0;
const SOLVER_STREAM: u64 = 1;

/// Outcome of one `estimate_distance` call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub matrix_seed: u64,
    pub solver_seed: u64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub certificate_error: f64,
    pub zero_certificate: bool,
    pub probes: usize,
    pub max_norm: f64,
    pub spectral_norm: f64,
    pub wall_time_s: f64,
}

/// Aggregated results for one axis value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis: usize,
    pub rank: usize,
    pub trials: Vec<TrialResult>,
    pub failures: Vec<String>,
    pub best: f64,
    pub p10: f64,
    pub p25: f64,
    pub median: f64,
    /// Median over trials of each bound; NaN when a bound's validity window
    /// is never met.
    pub ultimate_bound: f64,
    pub cross_bound: f64,
    pub thm4_bound: f64,
    pub thm8_bound: f64,
    pub thm8_c: f64,
    pub wall_time_s: f64,
}

impl SweepRecord {
    pub fn trial_count(&self) -> usize {
        self.trials.len()
    }

    pub fn eps_plus(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.eps_plus).collect()
    }

    /// Median spectral norm of the trial matrices.
    pub fn median_spectral_norm(&self) -> f64 {
        let v: Vec<f64> = self.trials.iter().map(|t| t.spectral_norm).collect();
        aggregate(&v).map_or(f64::NAN, |s| s.median)
    }
}

/// Everything needed to rerun a sweep and compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub total_wall_time_s: f64,
    /// How trial matrices were drawn.
    pub matrix_policy: String,
    pub spec: SweepSpec,
    pub records: Vec<SweepRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub manifest: RunManifest,
}

impl SweepOutcome {
    pub fn has_failures(&self) -> bool {
        self.records.iter().any(|r| !r.failures.is_empty())
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Seed of the matrix used by `trial` at axis value `value`. Rank sweeps keep
/// one matrix per trial across all ranks.
pub fn matrix_seed(spec: &SweepSpec, value: usize, trial: usize) -> u64 {
    let key = if spec.axis == SweepAxis::Rank { 0 } else { value as u64 };
    derive_seed(spec.master_seed, &[MATRIX_STREAM, trial as u64, key])
}

pub fn solver_seed(spec: &SweepSpec, value: usize, trial: usize) -> u64 {
    derive_seed(spec.master_seed, &[SOLVER_STREAM, value as u64, trial as u64])
}

fn median_of(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.filter(|x| !x.is_nan()).collect();
    aggregate(&v).map_or(f64::NAN, |s| s.median)
}

struct Prepared {
    matrix: DenseMatrix,
    bounds: BoundReport,
    spectral_norm: f64,
}

fn prepare(spec: &SweepSpec, value: usize, seed: u64) -> Result<Prepared> {
    let mut member = spec.member(value);
    member.seed = seed;
    let matrix = member.generate()?;
    let diag = diagnose(&matrix, spec.rank_tol)?;
    let bounds = bound_report(&diag, spec.rank_at(value), spec.thm8_c, 0.5);
    Ok(Prepared {
        matrix,
        bounds,
        spectral_norm: diag.spectral_norm,
    })
}

/// Runs every (axis value, trial) pair in order. Failed trials are listed in
/// the record and do not stop the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let started = unix_now();
    let clock = Instant::now();
    let random = spec.family.class.is_random();
    let search = SearchConfig {
        bs_tol: spec.bs_tol,
        restarts: spec.restarts,
        warm_start: spec.solver.warm_start,
        ..SearchConfig::default()
    };

    let carry = spec.carry_certificates && spec.axis == SweepAxis::Rank;
    let mut carried: Vec<Option<(f64, LowRankFactors)>> = vec![None; spec.trials];
    let mut records = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let r = spec.rank_at(value);
        let record_clock = Instant::now();
        let mut trials = Vec::new();
        let mut failures = Vec::new();
        let mut bounds = Vec::new();
        let mut shared: Option<Prepared> = None;

        for t in 0..spec.trials {
            let trial_clock = Instant::now();
            let mseed = if random { matrix_seed(spec, value, t) } else { spec.family.seed };
            let prepared = if random {
                prepare(spec, value, mseed)
            } else if let Some(p) = shared.take() {
                Ok(p)
            } else {
                prepare(spec, value, mseed)
            };
            let prepared = match prepared {
                Ok(p) => p,
                Err(e) => {
                    failures.push(format!("trial {t}: {e}"));
                    continue;
                }
            };
            let sseed = solver_seed(spec, value, t);
            let trial_search = SearchConfig {
                incumbent: if carry { carried[t].take() } else { None },
                ..search.clone()
            };
            match estimate_distance(&prepared.matrix, r, &trial_search, &spec.solver.ap_config(sseed)) {
                Ok(est) => {
                    trials.push(TrialResult {
                        trial: t,
                        matrix_seed: mseed,
                        solver_seed: sseed,
                        eps_plus: est.eps_plus,
                        eps_minus: est.eps_minus,
                        certificate_error: est.certificate_error,
                        zero_certificate: est.zero_certificate,
                        probes: est.probes.len(),
                        max_norm: prepared.matrix.max_norm(),
                        spectral_norm: prepared.spectral_norm,
                        wall_time_s: trial_clock.elapsed().as_secs_f64(),
                    });
                    if carry {
                        carried[t] = Some((est.eps_plus, est.certificate));
                    }
                }
                Err(e) => failures.push(format!("trial {t}: {e}")),
            }
            bounds.push(prepared.bounds.clone());
            if !random {
                shared = Some(prepared);
            }
        }

        let eps: Vec<f64> = trials.iter().map(|t| t.eps_plus).collect();
        let summary = aggregate(&eps).ok();
        let pick = |f: fn(&Summary) -> f64| summary.as_ref().map_or(f64::NAN, f);
        records.push(SweepRecord {
            axis: value,
            rank: r,
            trials,
            failures,
            best: pick(|s| s.best),
            p10: pick(|s| s.p10),
            p25: pick(|s| s.p25),
            median: pick(|s| s.median),
            ultimate_bound: median_of(bounds.iter().map(|b| b.ultimate)),
            cross_bound: median_of(bounds.iter().map(|b| b.cross)),
            thm4_bound: median_of(bounds.iter().map(|b| if b.thm4.valid { b.thm4.bound } else { f64::NAN })),
            thm8_bound: median_of(bounds.iter().map(|b| if b.thm8.valid { b.thm8.bound } else { f64::NAN })),
            thm8_c: spec.thm8_c,
            wall_time_s: record_clock.elapsed().as_secs_f64(),
        });
    }

    let matrix_policy = if random {
        "matrix and initial guess redrawn for every trial".to_string()
    } else {
        "one deterministic matrix per axis value; trials vary the initial guess".to_string()
    };
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_s: started,
        finished_unix_s: unix_now(),
        total_wall_time_s: clock.elapsed().as_secs_f64(),
        matrix_policy,
        spec: spec.clone(),
        records: records.clone(),
    };
    Ok(SweepOutcome { records, manifest })
}

/// Smallest constant `C` for which the thm8-type bound, which scales with
/// `√C`, dominates the best distance estimate of every record. Records
/// without a finite bound are skipped.
pub fn calibrate_thm8_c(records: &[SweepRecord]) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.thm8_bound.is_finite() && r.thm8_bound > 0.0 && r.best.is_finite())
        .map(|r| r.thm8_c * (r.best / r.thm8_bound).powi(2))
        .reduce(f64::max)
}
