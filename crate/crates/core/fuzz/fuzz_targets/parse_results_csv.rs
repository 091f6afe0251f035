#![no_main]

use libfuzzer_sys::fuzz_target;
use maxlr::harness::{format_csv, parse_results_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_results_csv(text) {
        if rows.is_empty() {
            return;
        }
        let text = format_csv(&rows).expect("rows must format");
        let again = parse_results_csv(&text).expect("round trip");
        assert_eq!(format_csv(&again).expect("rows must format"), text);
    }
});
