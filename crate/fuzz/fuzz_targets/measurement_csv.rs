#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::formats;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = formats::parse_measurements(text) {
        assert!(m.iter().all(|p| p.d2 > 0.0 && p.gain_db.is_finite()));
        assert_eq!(formats::parse_measurements(&formats::write_measurements(&m)).expect("round trip"), m);
    }
});
