//! Sweep runner: repeated distance estimates over one family parameter,
//! aggregated to percentiles and written as CSV, a TOML manifest and SVG plots.

mod output;
mod plot;
mod run;
mod spec;
mod stats;

pub use output::{
    emit_csv, format_csv, parse_results_csv, read_manifest, write_manifest, write_outputs,
    CsvRow, CSV_COLUMNS, CSV_FILE, MANIFEST_FILE,
};
pub use plot::{emit_plot, render_svg};
pub use run::{
    calibrate_thm8_c, matrix_seed, run_sweep, solver_seed, RunManifest, SweepOutcome,
    SweepRecord, TrialResult,
};
pub use spec::{PlotStyle, SolverSpec, SweepAxis, SweepSpec};
pub use stats::{aggregate, loglog_slope, ls_slope, pearson, percentile_sorted, Summary};
