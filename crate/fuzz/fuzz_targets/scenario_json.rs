#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::room::{self, RoomScenario};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mut sc) = RoomScenario::from_json(text) else { return };
    // bound the work per input
    if sc.max_order > 3 || sc.ris.rows.saturating_mul(sc.ris.cols) > 4096 {
        return;
    }
    sc.max_order = sc.max_order.max(1);
    if let Ok(comps) = room::trace_components(&sc, sc.max_order) {
        assert!(comps.iter().all(|c| c.delay_s.is_finite() && c.delay_s >= 0.0));
    }
});
