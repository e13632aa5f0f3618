#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::formats;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = formats::parse_profile_csv(text) {
        p.validate().expect("parsed profile is valid");
        let again = formats::parse_profile_csv(&formats::write_profile_csv(&p)).expect("round trip");
        assert_eq!(again, p);
    }
});
