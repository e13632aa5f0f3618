#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::formats;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = formats::parse_range(text) {
        assert!(!v.is_empty() && v.len() <= formats::MAX_RANGE_POINTS);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
});
