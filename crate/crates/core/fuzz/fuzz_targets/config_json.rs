#![no_main]

use libfuzzer_sys::fuzz_target;
use taperline::experiments::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::from_json(text) {
            assert_eq!(RunConfig::from_json(&cfg.to_json()).expect("echo re-parses"), cfg);
        }
    }
});
