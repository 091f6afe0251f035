//! Sweep configuration, read from TOML.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::apsolve::{
    ApConfig, DEFAULT_ABS_TOL, DEFAULT_BS_TOL, DEFAULT_FEAS_TOL, DEFAULT_MAX_ITER,
    DEFAULT_RESTARTS, DEFAULT_STALL_TOL, DEFAULT_STALL_WINDOW,
};
use crate::diagnostics::{DEFAULT_RANK_TOL, DEFAULT_THM8_C};
use crate::error::{Error, Result};
use crate::genmat::{MatrixClass, MatrixSpec};
use crate::matcore::{DEFAULT_OVERSAMPLING, DEFAULT_POWER_ITERS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Approximation rank `r`.
    Rank,
    /// Matrix size `n`.
    Size,
    /// Band width `b` (banded class).
    Band,
    /// Factor rank `k` (stiefel-product class).
    FactorRank,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Rank => "rank",
            SweepAxis::Size => "size",
            SweepAxis::Band => "band",
            SweepAxis::FactorRank => "factor-rank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotStyle {
    Loglog,
    Semilog,
}

impl PlotStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotStyle::Loglog => "loglog",
            PlotStyle::Semilog => "semilog",
        }
    }
}

/// Alternating-projection settings shared by every probe of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub max_iter: usize,
    pub feas_tol: f64,
    pub abs_tol: f64,
    pub stall_window: usize,
    pub stall_tol: f64,
    pub oversampling: usize,
    pub power_iters: usize,
    pub reuse_subspace: bool,
    pub warm_start: bool,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            feas_tol: DEFAULT_FEAS_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            stall_window: DEFAULT_STALL_WINDOW,
            stall_tol: DEFAULT_STALL_TOL,
            oversampling: DEFAULT_OVERSAMPLING,
            power_iters: DEFAULT_POWER_ITERS,
            reuse_subspace: true,
            warm_start: true,
        }
    }
}

impl SolverSpec {
    pub fn ap_config(&self, seed: u64) -> ApConfig {
        ApConfig {
            max_iter: self.max_iter,
            feas_tol: self.feas_tol,
            abs_tol: self.abs_tol,
            stall_window: self.stall_window,
            stall_tol: self.stall_tol,
            oversampling: self.oversampling,
            power_iters: self.power_iters,
            reuse_subspace: self.reuse_subspace,
            seed,
            ..ApConfig::default()
        }
    }
}

fn default_trials() -> usize {
    5
}
fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}
fn default_bs_tol() -> f64 {
    DEFAULT_BS_TOL
}
fn default_thm8_c() -> f64 {
    DEFAULT_THM8_C
}
fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOL
}
fn default_true() -> bool {
    true
}
fn default_plots() -> Vec<PlotStyle> {
    vec![PlotStyle::Loglog]
}

/// One experiment: a matrix family, one swept parameter, and repetition counts.
///
/// ```toml
/// axis = "rank"
/// values = [2, 4, 8, 16]
/// trials = 5
/// master_seed = 1
///
/// [family]
/// class = "identity"
/// n = 64
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Template; the swept field is overwritten per axis value and the seed
    /// per trial.
    pub family: MatrixSpec,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    /// Approximation rank when the axis is not `rank`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_bs_tol")]
    pub bs_tol: f64,
    #[serde(default = "default_thm8_c")]
    pub thm8_c: f64,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverSpec,
    /// On the rank axis, start each trial's search from the certificate it
    /// found at the previous rank.
    #[serde(default = "default_true")]
    pub carry_certificates: bool,
    #[serde(default = "default_plots")]
    pub plots: Vec<PlotStyle>,
    /// Write measured times into the CSV (otherwise 0). The manifest always
    /// carries the times.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(family: MatrixSpec, axis: SweepAxis, values: Vec<usize>) -> Self {
        Self {
            family,
            axis,
            values,
            rank: None,
            trials: default_trials(),
            restarts: default_restarts(),
            bs_tol: default_bs_tol(),
            thm8_c: default_thm8_c(),
            rank_tol: default_rank_tol(),
            master_seed: 0,
            solver: SolverSpec::default(),
            carry_certificates: true,
            plots: default_plots(),
            record_wall_time: false,
            output_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Serializes with every default filled in.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Family member for one axis value (seed left as in the template).
    pub fn member(&self, value: usize) -> MatrixSpec {
        let mut m = self.family.clone();
        match self.axis {
            SweepAxis::Size => m.n = value,
            SweepAxis::Band => m.b = Some(value),
            SweepAxis::FactorRank => m.k = Some(value),
            SweepAxis::Rank => {}
        }
        m
    }

    /// Approximation rank for one axis value.
    pub fn rank_at(&self, value: usize) -> usize {
        match self.axis {
            SweepAxis::Rank => value,
            _ => self.rank.unwrap_or(0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("`values` must not be empty".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("`values` must be strictly increasing".into()));
        }
        if self.trials == 0 || self.restarts == 0 {
            return Err(Error::Config("`trials` and `restarts` must be at least 1".into()));
        }
        if !(self.bs_tol > 0.0) || !(self.thm8_c > 0.0) || !(self.rank_tol > 0.0) {
            return Err(Error::Config("`bs_tol`, `thm8_c` and `rank_tol` must be positive".into()));
        }
        if self.solver.max_iter == 0 {
            return Err(Error::Config("`solver.max_iter` must be at least 1".into()));
        }
        let s = &self.solver;
        if !(s.feas_tol >= 0.0) || !(s.abs_tol >= 0.0) || !(s.stall_tol >= 0.0) {
            return Err(Error::Config("solver tolerances must be nonnegative".into()));
        }
        match (self.axis, self.family.class) {
            (SweepAxis::Band, c) if c != MatrixClass::Banded => {
                return Err(Error::Config("band axis needs the banded class".into()));
            }
            (SweepAxis::FactorRank, c) if c != MatrixClass::StiefelProduct => {
                return Err(Error::Config("factor-rank axis needs the stiefel-product class".into()));
            }
            (SweepAxis::Rank, _) if self.rank.is_some() => {
                return Err(Error::Config("`rank` is the swept value on the rank axis".into()));
            }
            (axis, _) if axis != SweepAxis::Rank && self.rank.is_none() => {
                return Err(Error::Config(format!("{} axis needs a fixed `rank`", axis.as_str())));
            }
            _ => {}
        }
        for &v in &self.values {
            let member = self.member(v);
            member.validate()?;
            let r = self.rank_at(v);
            if r == 0 || r > member.n {
                return Err(Error::InvalidRank { rank: r, max: member.n });
            }
        }
        Ok(())
    }
}
