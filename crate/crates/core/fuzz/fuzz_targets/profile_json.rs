#![no_main]

use libfuzzer_sys::fuzz_target;
use taperline::profiles::ImpedanceProfile;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = ImpedanceProfile::from_json(text) {
            assert_eq!(p.z_at(0.0).unwrap(), p.z_in());
            assert_eq!(p.z_at(p.length()).unwrap(), p.z_out());
            let _ = ImpedanceProfile::from_json(&p.to_json()).expect("round trip");
        }
    }
});
