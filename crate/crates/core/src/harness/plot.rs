//! Minimal self-contained SVG line plots of sweep records.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::run::SweepRecord;
use super::spec::PlotStyle;
use crate::error::{Error, Result};

const WIDTH: f64 = 680.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;

const OVERLAYS: [(&str, &str, &str); 3] = [
    ("ultimate", "ultimate bound", "#7f7f7f"),
    ("cross", "cross bound", "#2ca02c"),
    ("thm8", "HW-type bound", "#d62728"),
];

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn fit(values: &[f64], log: bool, px_lo: f64, px_hi: f64) -> Self {
        let t: Vec<f64> = values
            .iter()
            .filter_map(|&v| transform(v, log))
            .collect();
        let (mut lo, mut hi) = t
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            let pad = if log { 0.5 } else { lo.abs().max(1.0) * 0.5 };
            lo -= pad;
            hi += pad;
        } else {
            let pad = 0.04 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Self { log, lo, hi, px_lo, px_hi }
    }

    fn px(&self, v: f64) -> Option<f64> {
        let t = transform(v, self.log)?;
        Some(self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo))
    }

    /// Tick values in data units.
    fn ticks(&self, data: &[f64]) -> Vec<f64> {
        if self.log {
            let mut d: Vec<f64> = (self.lo.ceil() as i32..=self.hi.floor() as i32)
                .map(|e| 10f64.powi(e))
                .collect();
            if d.len() < 2 {
                d = vec![10f64.powf(self.lo), 10f64.powf(0.5 * (self.lo + self.hi)), 10f64.powf(self.hi)];
            }
            d
        } else {
            let mut d: Vec<f64> = data.iter().copied().filter(|v| v.is_finite()).collect();
            let stride = d.len().div_ceil(10).max(1);
            d = d.into_iter().step_by(stride).collect();
            d
        }
    }
}

fn transform(v: f64, log: bool) -> Option<f64> {
    match (log, v.is_finite()) {
        (_, false) => None,
        (true, _) if v <= 0.0 => None,
        (true, _) => Some(v.log10()),
        (false, _) => Some(v),
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn points(xs: &Axis, ys: &Axis, pairs: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    pairs
        .filter_map(|(x, y)| Some((xs.px(x)?, ys.px(y)?)))
        .collect()
}

fn point_list(p: &[(f64, f64)]) -> String {
    p.iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn overlay_value(r: &SweepRecord, key: &str) -> f64 {
    match key {
        "ultimate" => r.ultimate_bound,
        "cross" => r.cross_bound,
        _ => r.thm8_bound,
    }
}

/// SVG source for `records`; `x_label` names the swept parameter.
pub fn render_svg(records: &[SweepRecord], style: PlotStyle, x_label: &str) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let xs_data: Vec<f64> = records.iter().map(|r| r.axis as f64).collect();
    let mut ys_data = Vec::new();
    for r in records {
        ys_data.extend([r.best, r.p10, r.p25, r.median]);
        ys_data.extend(OVERLAYS.iter().map(|(k, _, _)| overlay_value(r, k)));
    }
    let x_log = style == PlotStyle::Loglog;
    let xs = Axis::fit(&xs_data, x_log, LEFT, WIDTH - RIGHT);
    let ys = Axis::fit(&ys_data, true, HEIGHT - BOTTOM, TOP);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        w,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );

    for t in xs.ticks(&xs_data) {
        if let Some(px) = xs.px(t) {
            let _ = writeln!(w, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(w, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 19.0, label(t));
        }
    }
    for t in ys.ticks(&ys_data) {
        if let Some(py) = ys.px(t) {
            let _ = writeln!(w, r##"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="#e0e0e0"/>"##);
            let _ = writeln!(w, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, py + 4.0, label(t));
        }
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{x_label}</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 12.0
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">max-norm error</text>"#,
        0.5 * (y0 + y1),
        0.5 * (y0 + y1)
    );

    let median = points(&xs, &ys, records.iter().map(|r| (r.axis as f64, r.median)));
    if records.len() > 1 {
        let upper = points(&xs, &ys, records.iter().map(|r| (r.axis as f64, r.p25)));
        let mut lower = points(&xs, &ys, records.iter().map(|r| (r.axis as f64, r.p10)));
        if upper.len() > 1 && lower.len() == upper.len() {
            lower.reverse();
            let band: Vec<(f64, f64)> = upper.into_iter().chain(lower).collect();
            let _ = writeln!(
                w,
                r##"<polygon id="band" points="{}" fill="#1f77b4" fill-opacity="0.2" stroke="none"/>"##,
                point_list(&band)
            );
        }
        let _ = writeln!(
            w,
            r##"<polyline id="median" points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
            point_list(&median)
        );
        for (key, _, color) in OVERLAYS {
            let p = points(&xs, &ys, records.iter().map(|r| (r.axis as f64, overlay_value(r, key))));
            if p.len() > 1 {
                let _ = writeln!(
                    w,
                    r#"<polyline id="bound-{key}" points="{}" fill="none" stroke="{color}" stroke-dasharray="6 4"/>"#,
                    point_list(&p)
                );
            }
        }
    } else {
        for (x, y) in &median {
            let _ = writeln!(w, r##"<circle id="median" cx="{x:.2}" cy="{y:.2}" r="4" fill="#1f77b4"/>"##);
        }
    }
    for (x, y) in points(&xs, &ys, records.iter().map(|r| (r.axis as f64, r.best))) {
        let _ = writeln!(
            w,
            r#"<circle class="best" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="none" stroke="black"/>"#
        );
    }

    let lx = WIDTH - RIGHT + 15.0;
    let mut ly = TOP + 10.0;
    let mut legend = |w: &mut String, text: &str, color: &str, dashed: bool| {
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(w, r#"<text x="{}" y="{}">{text}</text>"#, lx + 30.0, ly + 4.0);
        ly += 18.0;
    };
    legend(w, "median", "#1f77b4", false);
    legend(w, "p10-p25", "#a6c8e0", false);
    legend(w, "best (circles)", "black", false);
    for (_, text, color) in OVERLAYS {
        legend(w, text, color, true);
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

pub fn emit_plot(records: &[SweepRecord], style: PlotStyle, x_label: &str, path: &Path) -> Result<()> {
    fs::write(path, render_svg(records, style, x_label)?)?;
    Ok(())
}
