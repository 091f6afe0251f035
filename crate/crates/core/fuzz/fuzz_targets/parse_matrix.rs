#![no_main]

use libfuzzer_sys::fuzz_target;
use maxlr::matcore::io::{format_matrix, parse_matrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        let again = parse_matrix(&format_matrix(&m)).expect("written matrix must parse");
        assert_eq!(m.shape(), again.shape());
        for (a, b) in m.data().iter().zip(again.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
});
