//! Replays the checked-in fuzz seeds through the same round-trip checks the
//! fuzz targets perform.

use std::fs;
use std::path::PathBuf;

use maxlr::harness::{format_csv, parse_results_csv, SweepSpec};
use maxlr::matcore::io::{format_matrix, parse_matrix};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            (path, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn matrix_seeds_round_trip() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_matrix") {
        if let Ok(m) = parse_matrix(&text) {
            let again = parse_matrix(&format_matrix(&m)).unwrap();
            assert_eq!(again, m, "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted > 0);
}

#[test]
fn sweep_config_seeds_round_trip() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_sweep_config") {
        if let Ok(spec) = SweepSpec::from_toml(&text) {
            let again = SweepSpec::from_toml(&spec.to_toml().unwrap()).unwrap();
            assert_eq!(again, spec, "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted > 0);
}

#[test]
fn results_csv_seeds_round_trip() {
    let mut accepted = 0;
    for (path, text) in seeds("parse_results_csv") {
        if let Ok(rows) = parse_results_csv(&text) {
            if rows.is_empty() {
                continue;
            }
            let written = format_csv(&rows).unwrap();
            let again = format_csv(&parse_results_csv(&written).unwrap()).unwrap();
            assert_eq!(again, written, "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted > 0);
}

#[test]
fn shipped_configs_validate() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let spec = SweepSpec::from_toml(&fs::read_to_string(&path).unwrap());
        spec.and_then(|s| s.validate()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count > 0);
}
