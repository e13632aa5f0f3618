//! Boundary distances and the beamforming-error factor K.

use proptest::prelude::*;
use ris_core::nearfield::{self, ApertureSpec, KOptions};
use ris_core::presets::{self, RisSurface};
use ris_core::synthesis::{synthesize_gradient_phase, PhaseProfile, ReflectionSpec, RisGeometry};

const LAMBDA: f64 = 299_792_458.0 / 304.2e9;

fn small_profile(n: usize, theta: f64, bits: Option<i64>) -> PhaseProfile {
    let g = RisGeometry::with_pitch(n, n, 0.5e-3, 304.2e9).unwrap();
    let p = synthesize_gradient_phase(&g, &ReflectionSpec::normal_to(theta)).unwrap();
    match bits {
        Some(b) => ris_core::synthesis::quantize_phase(&p, b).unwrap(),
        None => p,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn k_is_bounded(n in 4usize..24, theta in 0.0f64..60.0, bits in prop::option::of(1i64..4), d in 0.01f64..50.0) {
        let p = small_profile(n, theta, bits);
        let k = nearfield::k_factor_with(&p, d, theta, &KOptions::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&k), "K = {k}");
    }

    #[test]
    fn halving_side_quarters_rayleigh(side in 0.005f64..0.5, tilt in 0.0f64..80.0) {
        let a = nearfield::boundaries(&ApertureSpec::new(side, LAMBDA), tilt).unwrap();
        let b = nearfield::boundaries(&ApertureSpec::new(side / 2.0, LAMBDA), tilt).unwrap();
        prop_assert!((a.rayleigh_m / b.rayleigh_m - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_ordering(side in 0.02f64..0.5, tilt in 0.0f64..80.0, eff in 0.05f64..1.0) {
        let r = nearfield::boundaries(&ApertureSpec::new(side, LAMBDA).with_efficiency(eff), tilt).unwrap();
        prop_assert!(r.fresnel_m < r.rayleigh_m);
        prop_assert!(r.df_broadside_m < r.rayleigh_m && r.df_tilted_m <= r.df_broadside_m);
        prop_assert!((r.df_effective_m - eff * r.df_tilted_m).abs() < 1e-12);
    }

    #[test]
    fn approximate_k_is_bounded(d in 0.05f64..100.0, theta in 0.0f64..60.0) {
        let k2 = nearfield::k_squared_approximate(0.05, LAMBDA, d, theta).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&k2));
    }
}

#[test]
fn reference_distances() {
    let r = nearfield::boundaries(&presets::aperture(), 0.0).unwrap();
    // r_RD = 2 D² / λ with the diagonal
    let want = 2.0 * 2.0 * 0.05f64.powi(2) / LAMBDA;
    assert!((r.rayleigh_m - want).abs() < 1e-12);
    assert!((r.rayleigh_m - 10.15).abs() <= 0.05);
    assert!((r.fresnel_m - 0.62 * (0.05f64.powi(3) / LAMBDA).sqrt()).abs() < 1e-12);
}

#[test]
fn k_three_db_crossing_tracks_depth_of_focus() {
    let p = presets::lossless_profile(RisSurface::Continuous);
    let df = nearfield::boundaries(&presets::aperture(), 30.0).unwrap().df_tilted_m;
    let d: Vec<f64> = (0..=120).map(|i| 0.2 + i as f64 * 0.01).collect();
    let k = nearfield::k_sweep(&p, &d, 30.0, &KOptions::default()).unwrap();
    let crossing = k.windows(2).find(|w| w[0].1 < -3.0 && w[1].1 >= -3.0).map(|w| {
        let t = (-3.0 - w[0].1) / (w[1].1 - w[0].1);
        w[0].0 + t * (w[1].0 - w[0].0)
    });
    let c = crossing.expect("K² crosses -3 dB");
    assert!((c / df - 1.0).abs() <= 0.20, "crossing {c} m vs df {df} m");
}

#[test]
fn k_tends_to_one() {
    let p = presets::profile(RisSurface::Quantized(3));
    let k = nearfield::k_factor(&p, 100.0, 30.0).unwrap();
    assert!(20.0 * k.log10() >= -0.05);
}

#[test]
fn invalid_inputs_rejected() {
    let p = presets::profile(RisSurface::Quantized(3));
    assert!(nearfield::k_factor(&p, 1e-5, 30.0).is_err());
    assert!(nearfield::boundaries(&ApertureSpec::new(0.05, LAMBDA), 90.0).is_err());
    assert!(nearfield::boundaries(&ApertureSpec::new(-0.05, LAMBDA), 0.0).is_err());
    assert!(nearfield::boundaries(&ApertureSpec::new(0.05, LAMBDA).with_efficiency(1.5), 0.0).is_err());
}
