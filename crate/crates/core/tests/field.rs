//! Scattered-field evaluation against brute-force and closed-form oracles.

use num_complex::Complex64;
use proptest::prelude::*;
use ris_core::field::{self, angle_grid, ObservationSpec};
use ris_core::presets::{self, RisSurface};
use ris_core::synthesis::{Direction, PhaseProfile, RisGeometry};
use std::f64::consts::{PI, TAU};

const F: f64 = 304.2e9;
const C: f64 = 299_792_458.0;

fn profile(rows: usize, cols: usize, phase: Vec<f64>, amp: Vec<f64>) -> PhaseProfile {
    let g = RisGeometry::with_pitch(rows, cols, 0.5e-3, F).unwrap();
    let mut p = PhaseProfile::uniform(g, 0.0);
    p.phase = phase;
    p.amplitude = amp;
    p
}

fn arb_profile() -> impl Strategy<Value = PhaseProfile> {
    (1usize..10, 1usize..10).prop_flat_map(|(r, c)| {
        (
            proptest::collection::vec(0.0..TAU, r * c),
            proptest::collection::vec(0.1f64..1.0, r * c),
        )
            .prop_map(move |(ph, a)| profile(r, c, ph, a))
    })
}

fn unit(d: Direction) -> [f64; 3] {
    let (t, p) = (d.theta_deg.to_radians(), d.phi_deg.to_radians());
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

/// Direct double sum of the physical-optics far field, cos element factors.
fn brute_far(p: &PhaseProfile, inc: Direction, out: Direction) -> Complex64 {
    let g = &p.geometry;
    let lam = C / F;
    let k = TAU / lam;
    let (ui, uo) = (unit(inc), unit(out));
    let mut s = Complex64::new(0.0, 0.0);
    for m in 0..g.rows {
        for n in 0..g.cols {
            let x = (m as f64 - (g.rows as f64 - 1.0) / 2.0) * g.pitch;
            let y = (n as f64 - (g.cols as f64 - 1.0) / 2.0) * g.pitch;
            let i = m * g.cols + n;
            let gamma = Complex64::from_polar(p.amplitude[i], p.phase[i]);
            let arg = -k * ((ui[0] + uo[0]) * x + (ui[1] + uo[1]) * y);
            s += gamma * Complex64::from_polar(1.0, arg);
        }
    }
    s * (ui[2].max(0.0) * uo[2].max(0.0) * g.pitch * g.pitch / lam)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn far_field_matches_direct_sum(
        p in arb_profile(),
        ti in -60.0f64..60.0, pi_ in 0.0f64..360.0,
        to in -85.0f64..85.0, po in 0.0f64..360.0,
    ) {
        let (inc, out) = (Direction::new(ti, pi_), Direction::new(to, po));
        let got = field::far_field_value(&p, inc, out, 1.0).unwrap();
        let want = brute_far(&p, inc, out);
        let scale = p.amplitude.iter().sum::<f64>() * 0.25e-6 / (C / F);
        prop_assert!((got - want).norm() <= 1e-9 * scale, "{got} vs {want}");
    }

    #[test]
    fn binary_profiles_scatter_symmetrically(bits in proptest::collection::vec(any::<bool>(), 36), theta in 0.0f64..89.0) {
        let phase = bits.iter().map(|&b| if b { PI } else { 0.0 }).collect();
        let p = profile(6, 6, phase, vec![1.0; 36]);
        let a = field::bistatic_rcs_dbsm(&p, Direction::NORMAL, Direction::new(theta, 0.0), 1.0).unwrap();
        let b = field::bistatic_rcs_dbsm(&p, Direction::NORMAL, Direction::new(-theta, 0.0), 1.0).unwrap();
        prop_assert!(a == b || (a - b).abs() < 1e-9 || (a < -250.0 && b < -250.0));
    }

    #[test]
    fn amplitude_scales_power(p in arb_profile(), s in 0.05f64..1.0, theta in -80.0f64..80.0) {
        let mut q = p.clone();
        q.amplitude.iter_mut().for_each(|a| *a *= s);
        let out = Direction::new(theta, 0.0);
        let e1 = field::far_field_value(&p, Direction::NORMAL, out, 1.0).unwrap();
        let e2 = field::far_field_value(&q, Direction::NORMAL, out, 1.0).unwrap();
        prop_assert!((e2 - e1 * s).norm() <= 1e-12 * (1.0 + e1.norm()));
    }

    #[test]
    fn near_field_converges_to_far_field(p in arb_profile(), theta in -70.0f64..70.0) {
        let obs = |spec: ObservationSpec| field::compute_pattern(&p, &spec).unwrap().values[0];
        let ff = obs(ObservationSpec::far_field(vec![theta]));
        let nf = obs(ObservationSpec::near_field(1e5, vec![theta]));
        prop_assert!((ff - nf).norm() <= 1e-3 * ff.norm().max(1e-6 * p.geometry.area() / (C / F)));
    }
}

#[test]
fn evaluation_is_deterministic() {
    let p = presets::profile(RisSurface::Quantized(2));
    let spec = ObservationSpec::near_field(0.7, angle_grid(-60.0, 60.0, 0.25));
    let a = field::compute_pattern(&p, &spec).unwrap();
    let b = field::compute_pattern(&p, &spec).unwrap();
    assert_eq!(a.power_db, b.power_db);
}

#[test]
fn continuous_beam_width_and_sidelobes() {
    let p = presets::lossless_profile(RisSurface::Continuous);
    let pat = field::compute_pattern(&p, &ObservationSpec::far_field(angle_grid(15.0, 45.0, 0.005))).unwrap();
    let m = field::pattern_metrics(&pat).unwrap();
    let lam = C / F;
    let want = (0.886 * lam / (presets::SIDE_M * 30f64.to_radians().cos())).to_degrees();
    assert!((m.peak_angle_deg - 30.0).abs() < 0.01);
    assert!((m.hpbw_deg - want).abs() <= 0.15, "hpbw {} vs {want}", m.hpbw_deg);
    let sll = m.sll_db.unwrap();
    assert!((sll + 13.3).abs() <= 0.7, "sll {sll}");
}

#[test]
fn plate_rcs_matches_closed_form() {
    for (rows, pitch) in [(40usize, 0.5e-3), (100, 0.5e-3), (64, 0.4e-3)] {
        let g = RisGeometry::with_pitch(rows, rows, pitch, F).unwrap();
        let p = PhaseProfile::uniform(g.clone(), 0.0);
        let r = field::compute_rcs(&p, &[0.0], Direction::NORMAL).unwrap();
        let lam = C / F;
        let want = 10.0 * (4.0 * PI * g.area().powi(2) / (lam * lam)).log10();
        assert!((r.at(0.0).unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn invalid_observations_rejected() {
    let p = presets::profile(RisSurface::Pec);
    assert!(field::compute_pattern(&p, &ObservationSpec::near_field(-1.0, vec![0.0])).is_err());
    assert!(field::compute_pattern(&p, &ObservationSpec::far_field(vec![])).is_err());
    assert!(field::compute_pattern(&p, &ObservationSpec::far_field(vec![f64::NAN])).is_err());
}
