#![no_main]

use libfuzzer_sys::fuzz_target;
use maxlr::harness::SweepSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = SweepSpec::from_toml(text) {
        let text = spec.to_toml().expect("accepted config must serialize");
        assert_eq!(SweepSpec::from_toml(&text).expect("round trip"), spec);
    }
});
