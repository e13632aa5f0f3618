#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::formats;
use ris_core::sounder::{self, SounderConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let cfg = SounderConfig::default();
    if let Ok(cir) = formats::parse_cir_csv(text, cfg.chip_duration_s) {
        assert!(cir.taps.windows(2).all(|w| w[0].delay_s < w[1].delay_s));
        let again = formats::parse_cir_csv(&formats::write_cir_csv(&cir), cfg.chip_duration_s).expect("round trip");
        assert_eq!(again, cir);
        let _ = sounder::sound_channel(&cir, &cfg, None);
    }
});
