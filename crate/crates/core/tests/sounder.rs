//! Correlative sounder: sequence properties and CIR round trips.

use num_complex::Complex64;
use proptest::prelude::*;
use ris_core::sounder::{self, Cir, SounderConfig, Tap};

fn tap(delay_s: f64, re: f64, im: f64) -> Tap {
    Tap { delay_s, amplitude: Complex64::new(re, im) }
}

#[test]
fn every_tap_table_entry_is_maximal() {
    for k in 2..=16u32 {
        let len = (1usize << k) - 1;
        let s = sounder::generate_mls(len, 1).unwrap();
        assert!(s.iter().all(|&x| x == 1.0 || x == -1.0));
        let plus = s.iter().filter(|&&x| x > 0.0).count();
        assert_eq!(plus.abs_diff(len - plus), 1, "k = {k}");
        if k <= 12 {
            let ac = sounder::periodic_autocorrelation(&s);
            assert_eq!(ac[0], len as f64);
            assert!(ac[1..].iter().all(|&v| v == -1.0), "k = {k}");
        } else {
            for lag in [1, 2, 3, len / 3, len / 2, len - 1] {
                let r: f64 = (0..len).map(|i| s[i] * s[(i + lag) % len]).sum();
                assert_eq!(r, -1.0, "k = {k}, lag {lag}");
            }
        }
    }
}

#[test]
fn sequence_is_balanced() {
    let s = sounder::generate_mls(4095, 1).unwrap();
    let plus = s.iter().filter(|&&x| x > 0.0).count();
    let minus = s.len() - plus;
    assert_eq!((plus.max(minus), plus.min(minus)), (2048, 2047));
}

#[test]
fn invalid_sequences_rejected() {
    assert!(sounder::generate_mls(4096, 1).is_err());
    assert!(sounder::generate_mls(4095, 0).is_err());
    assert!(sounder::generate_mls(1, 1).is_err());
    assert!(sounder::generate_mls((1 << 17) - 1, 1).is_err());
}

#[test]
fn default_timing() {
    let cfg = SounderConfig::default();
    assert!((cfg.chip_duration_s - 108.5e-12).abs() < 0.1e-12);
    assert!((cfg.sequence_duration_s() - 444.14e-9).abs() < 0.01e-9);
}

#[test]
fn two_taps_five_chips_apart_are_resolved() {
    let cfg = SounderConfig::default();
    let tc = cfg.chip_duration_s;
    let cir = Cir::new(vec![tap(40.0 * tc, 1.0, 0.0), tap(45.0 * tc, 0.0, 0.5)], tc).unwrap();
    let got = sounder::sound_channel(&cir, &cfg, None).unwrap();
    assert_eq!(got.taps.len(), 2);
    for (g, t) in got.taps.iter().zip(&cir.taps) {
        assert!((g.delay_s - t.delay_s).abs() < 1e-15);
        // each tap leaks −1/L of the other through the sequence sidelobe
        assert!((g.amplitude - t.amplitude).norm() < 1e-3);
    }
}

#[test]
fn empty_channel_yields_no_taps() {
    let cfg = SounderConfig::default();
    let got = sounder::sound_channel(&Cir::new(vec![], cfg.chip_duration_s).unwrap(), &cfg, None).unwrap();
    assert!(got.taps.is_empty());
    assert_eq!(got.resolution_s, cfg.chip_duration_s);
}

#[test]
fn aliased_delays_rejected() {
    let cfg = SounderConfig::default();
    let cir = Cir::new(vec![tap(cfg.sequence_duration_s(), 1.0, 0.0)], cfg.chip_duration_s).unwrap();
    assert!(sounder::sound_channel(&cir, &cfg, None).is_err());
}

#[test]
fn noisy_recovery_is_reproducible() {
    let cfg = SounderConfig::default();
    let cir = Cir::new(vec![tap(3e-9, 1.0, 0.0), tap(50e-9, 0.3, 0.0)], cfg.chip_duration_s).unwrap();
    let a = sounder::sound_channel(&cir, &cfg, Some(0.0)).unwrap();
    let b = sounder::sound_channel(&cir, &cfg, Some(0.0)).unwrap();
    assert_eq!(a, b);
    // both taps sit well above the correlator floor at 0 dB input SNR
    assert_eq!(a.taps.len(), 2);
    for (g, t) in a.taps.iter().zip(&cir.taps) {
        assert!((g.delay_s - t.delay_s).abs() <= cfg.chip_duration_s);
        let err_db = 20.0 * (g.amplitude.norm() / t.amplitude.norm()).log10();
        assert!(err_db.abs() <= 1.0, "{err_db}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn whole_chip_delay_shifts_recovered_taps(
        chips in proptest::collection::btree_set(0usize..3000, 1..6),
        shift in 0usize..1000,
        re in -1.0f64..1.0, im in -1.0f64..1.0,
    ) {
        prop_assume!(re.hypot(im) > 0.05);
        let cfg = SounderConfig::default();
        let tc = cfg.chip_duration_s;
        let taps: Vec<Tap> = chips.iter().map(|&c| tap(c as f64 * tc, re, im)).collect();
        let cir = Cir::new(taps, tc).unwrap();
        let a = sounder::sound_channel(&cir, &cfg, None).unwrap();
        let b = sounder::sound_channel(&cir.delayed(shift, tc).unwrap(), &cfg, None).unwrap();
        prop_assert_eq!(a.taps.len(), chips.len());
        prop_assert_eq!(a.taps.len(), b.taps.len());
        for (x, y) in a.taps.iter().zip(&b.taps) {
            let dx = (y.delay_s - x.delay_s) / tc;
            prop_assert!((dx - shift as f64).abs() < 1e-6);
        }
    }
}
