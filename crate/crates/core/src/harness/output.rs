//! CSV results table and TOML manifest.

use std::fs;
use std::path::{Path, PathBuf};

use super::plot::emit_plot;
use super::run::{RunManifest, SweepOutcome, SweepRecord};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 12] = [
    "axis",
    "trial_count",
    "best",
    "p10",
    "p25",
    "median",
    "ultimate_bound",
    "cross_bound",
    "thm4_bound",
    "thm8_bound",
    "thm8_C",
    "wall_time_s",
];

pub const CSV_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// One row of the results table.
#[derive(Debug, Clone, Copy)]
pub struct CsvRow {
    pub axis: usize,
    pub trial_count: usize,
    pub best: f64,
    pub p10: f64,
    pub p25: f64,
    pub median: f64,
    pub ultimate_bound: f64,
    pub cross_bound: f64,
    pub thm4_bound: f64,
    pub thm8_bound: f64,
    pub thm8_c: f64,
    pub wall_time_s: f64,
}

impl CsvRow {
    pub fn from_record(r: &SweepRecord, with_wall_time: bool) -> Self {
        Self {
            axis: r.axis,
            trial_count: r.trial_count(),
            best: r.best,
            p10: r.p10,
            p25: r.p25,
            median: r.median,
            ultimate_bound: r.ultimate_bound,
            cross_bound: r.cross_bound,
            thm4_bound: r.thm4_bound,
            thm8_bound: r.thm8_bound,
            thm8_c: r.thm8_c,
            wall_time_s: if with_wall_time { r.wall_time_s } else { 0.0 },
        }
    }

    fn reals(&self) -> [f64; 10] {
        [
            self.best,
            self.p10,
            self.p25,
            self.median,
            self.ultimate_bound,
            self.cross_bound,
            self.thm4_bound,
            self.thm8_bound,
            self.thm8_c,
            self.wall_time_s,
        ]
    }
}

/// Bitwise equality, so rows with NaN bounds compare equal to themselves.
impl PartialEq for CsvRow {
    fn eq(&self, other: &Self) -> bool {
        self.axis == other.axis
            && self.trial_count == other.trial_count
            && self
                .reals()
                .iter()
                .zip(other.reals().iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_csv(rows: &[CsvRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        let mut fields = vec![row.axis.to_string(), row.trial_count.to_string()];
        fields.extend(row.reals().iter().map(|&x| real(x)));
        w.write_record(&fields)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Parses a results table written by [`format_csv`].
pub fn parse_results_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = records.next().ok_or(Error::EmptyInput)??;
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec?;
        if rec.len() != CSV_COLUMNS.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", CSV_COLUMNS.len(), rec.len()),
            });
        }
        let int = |j: usize| -> Result<usize> {
            rec[j].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer in column {}", CSV_COLUMNS[j]),
            })
        };
        let mut reals = [0.0; 10];
        for (k, slot) in reals.iter_mut().enumerate() {
            *slot = rec[k + 2].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad number in column {}", CSV_COLUMNS[k + 2]),
            })?;
        }
        let [best, p10, p25, median, ultimate_bound, cross_bound, thm4_bound, thm8_bound, thm8_c, wall_time_s] =
            reals;
        rows.push(CsvRow {
            axis: int(0)?,
            trial_count: int(1)?,
            best,
            p10,
            p25,
            median,
            ultimate_bound,
            cross_bound,
            thm4_bound,
            thm8_bound,
            thm8_c,
            wall_time_s,
        });
    }
    Ok(rows)
}

/// Writes `results.csv` at `path` and the manifest next to it.
pub fn emit_csv(records: &[SweepRecord], manifest: &RunManifest, path: &Path) -> Result<()> {
    let rows: Vec<CsvRow> = records
        .iter()
        .map(|r| CsvRow::from_record(r, manifest.spec.record_wall_time))
        .collect();
    let text = format_csv(&rows)?;
    fs::write(path, text)?;
    let sidecar = path.with_file_name(MANIFEST_FILE);
    write_manifest(manifest, &sidecar)
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<()> {
    let text = toml::to_string(manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
}

/// Writes the CSV, the manifest and one SVG per requested style into `dir`.
pub fn write_outputs(outcome: &SweepOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(CSV_FILE);
    emit_csv(&outcome.records, &outcome.manifest, &csv_path)?;
    let mut written = vec![csv_path, dir.join(MANIFEST_FILE)];
    let spec = &outcome.manifest.spec;
    for &style in &spec.plots {
        let path = dir.join(format!("plot_{}.svg", style.as_str()));
        emit_plot(&outcome.records, style, spec.axis.as_str(), &path)?;
        written.push(path);
    }
    Ok(written)
}
