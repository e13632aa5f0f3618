//! Near-field boundary distances and the far-field beamforming error factor K.
//!
//! `K²(d, θ)` compares a far-field-designed profile with a phase-matched
//! (focusing) profile of the same amplitudes at range `d`. To keep the
//! quantization loss, which the RCS already carries, out of `K`, the
//! near-field ratio is divided by the same ratio in the far field:
//!
//! `K² = (|E_d|² / |E_d,matched|²) / (|E_∞|² / |E_∞,matched|²)`
//!
//! so `K → 1` as `d → ∞` for continuous and quantized profiles alike.

use crate::error::{Error, Result};
use crate::field;
use crate::math;
use crate::synthesis::{Direction, PhaseProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which aperture dimension each boundary formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalConvention {
    pub rayleigh: bool,
    pub fresnel: bool,
    pub depth_of_focus: bool,
}

impl Default for DiagonalConvention {
    fn default() -> Self {
        DiagonalConvention {
            rayleigh: true,
            fresnel: false,
            depth_of_focus: true,
        }
    }
}

/// Square aperture of side `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureSpec {
    pub side_length: f64,
    pub wavelength: f64,
    /// Effective-aperture area ratio.
    #[serde(default = "one")]
    pub efficiency: f64,
    #[serde(default)]
    pub diagonal_convention: DiagonalConvention,
}

fn one() -> f64 {
    1.0
}

impl ApertureSpec {
    pub fn new(side_length: f64, wavelength: f64) -> Self {
        ApertureSpec {
            side_length,
            wavelength,
            efficiency: 1.0,
            diagonal_convention: DiagonalConvention::default(),
        }
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Self {
        self.efficiency = efficiency;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_length > 0.0 && self.side_length.is_finite()) {
            return Err(Error::Argument(format!("side length must be > 0, got {}", self.side_length)));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::Argument(format!("wavelength must be > 0, got {}", self.wavelength)));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::Argument(format!(
                "efficiency must be in (0, 1], got {}",
                self.efficiency
            )));
        }
        Ok(())
    }

    pub fn effective_area(&self) -> f64 {
        self.efficiency * self.side_length * self.side_length
    }

    fn dim(&self, diagonal: bool) -> f64 {
        if diagonal {
            std::f64::consts::SQRT_2 * self.side_length
        } else {
            self.side_length
        }
    }
}

/// Boundary distances in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub fresnel_m: f64,
    pub rayleigh_m: f64,
    pub df_broadside_m: f64,
    pub df_tilted_m: f64,
    pub df_effective_m: f64,
}

/// Fresnel, Rayleigh and depth-of-focus distances for a beam tilted by `tilt_deg`.
pub fn boundaries(aperture: &ApertureSpec, tilt_deg: f64) -> Result<BoundaryReport> {
    aperture.validate()?;
    if !(0.0..90.0).contains(&tilt_deg) {
        return Err(Error::Argument(format!("tilt must be in [0, 90) deg, got {tilt_deg}")));
    }
    let lam = aperture.wavelength;
    let c = aperture.diagonal_convention;
    let df = aperture.dim(c.depth_of_focus);
    let fr = aperture.dim(c.fresnel);
    let rd = aperture.dim(c.rayleigh);
    let cos_t = tilt_deg.to_radians().cos();
    let df_broadside = 0.1 * 2.0 * df * df / lam;
    let df_tilted = df_broadside * cos_t * cos_t;
    Ok(BoundaryReport {
        fresnel_m: 0.62 * (fr * fr * fr / lam).sqrt(),
        rayleigh_m: 2.0 * rd * rd / lam,
        df_broadside_m: df_broadside,
        df_tilted_m: df_tilted,
        df_effective_m: aperture.efficiency * df_tilted,
    })
}

/// Illumination, scan plane and element exponent used when evaluating K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KOptions {
    pub incident: Direction,
    pub cut_deg: f64,
    pub element_q: f64,
}

impl Default for KOptions {
    fn default() -> Self {
        KOptions {
            incident: Direction::NORMAL,
            cut_deg: 0.0,
            element_q: 1.0,
        }
    }
}

/// Amplitude factor `K ∈ [0, 1]` at range `distance` toward `theta_deg`.
pub fn k_factor(profile: &PhaseProfile, distance: f64, theta_deg: f64) -> Result<f64> {
    k_factor_with(profile, distance, theta_deg, &KOptions::default())
}

pub fn k_factor_with(profile: &PhaseProfile, distance: f64, theta_deg: f64, opts: &KOptions) -> Result<f64> {
    if theta_deg.abs() >= 90.0 {
        return Err(Error::Argument(format!("|theta| must be < 90 deg, got {theta_deg}")));
    }
    let r = field::coherence_ratios(
        profile,
        opts.incident,
        Direction::in_cut(theta_deg, opts.cut_deg),
        distance,
        opts.element_q,
    )?;
    if r.far <= 0.0 {
        return Err(Error::Observation(format!(
            "profile radiates no far-field power toward {theta_deg} deg"
        )));
    }
    // tiny excess over 1 is summation noise near convergence
    Ok((r.near / r.far).min(1.0).sqrt())
}

/// K evaluated on the central sub-aperture whose area is `efficiency` of the full one.
pub fn k_factor_effective(
    profile: &PhaseProfile,
    efficiency: f64,
    distance: f64,
    theta_deg: f64,
    opts: &KOptions,
) -> Result<f64> {
    let crop = profile.effective_aperture(efficiency)?;
    k_factor_with(&crop, distance, theta_deg, opts)
}

/// `(d, 20·log10 K)` for every distance.
pub fn k_sweep(profile: &PhaseProfile, distances: &[f64], theta_deg: f64, opts: &KOptions) -> Result<Vec<(f64, f64)>> {
    distances
        .par_iter()
        .map(|&d| k_factor_with(profile, d, theta_deg, opts).map(|k| (d, 20.0 * k.log10())))
        .collect()
}

/// `|∫₀¹ e^{jαt²} dt|²` by composite Simpson quadrature.
fn fresnel_gain(alpha: f64) -> f64 {
    let n = 2048usize;
    let h = 1.0 / n as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for i in 0..=n {
        let t = i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let (s, c) = (alpha * t * t).sin_cos();
        re += w * c;
        im += w * s;
    }
    let (re, im) = (re * h / 3.0, im * h / 3.0);
    re * re + im * im
}

/// Approximate `K²` of a uniformly illuminated square aperture of side `L`
/// from the separable quadratic (Fresnel) phase error across the aperture.
pub fn k_squared_approximate(side_length: f64, wavelength: f64, distance: f64, theta_deg: f64) -> Result<f64> {
    if !(side_length > 0.0 && wavelength > 0.0 && distance > 0.0) {
        return Err(Error::Argument("side, wavelength and distance must be > 0".into()));
    }
    let k = math::TWO_PI / wavelength;
    let h = side_length / 2.0;
    let c = theta_deg.to_radians().cos();
    let ax = k * h * h * c * c / (2.0 * distance);
    let ay = k * h * h / (2.0 * distance);
    Ok(fresnel_gain(ax) * fresnel_gain(ay))
}
