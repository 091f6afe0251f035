//! Order statistics for trial aggregation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub p10: f64,
    pub p25: f64,
    pub best: f64,
}

/// Percentile `q ∈ [0, 1]` of sorted data, linear interpolation between
/// closest ranks (position `q (n − 1)`).
pub fn percentile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    })
}

/// Median, 10th and 25th percentiles and minimum. NaN entries are rejected.
pub fn aggregate(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Config("cannot aggregate NaN values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        median: percentile_sorted(&sorted, 0.5)?,
        p10: percentile_sorted(&sorted, 0.1)?,
        p25: percentile_sorted(&sorted, 0.25)?,
        best: sorted[0],
    })
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidDimensions(format!(
            "slope needs two or more paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidDimensions("x values are all equal".into()));
    }
    Ok(sxy / sxx)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    ls_slope(&lx, &ly)
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let slope_xy = ls_slope(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if syy == 0.0 {
        return Err(Error::InvalidDimensions("y values are all equal".into()));
    }
    Ok(slope_xy * (sxx / syy).sqrt())
}
