//! The 304.2 GHz, 100×100-cell device and its reference values.

use crate::error::{Error, Result};
use crate::nearfield::ApertureSpec;
use crate::synthesis::{quantize_phase, synthesize_gradient_phase, PhaseProfile, ReflectionSpec, RisGeometry};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const FREQUENCY_HZ: f64 = 304.2e9;
pub const CELLS: usize = 100;
/// 5 cm side over 100 cells.
pub const PITCH_M: f64 = 0.5e-3;
pub const SIDE_M: f64 = 0.05;
pub const DESIGN_ANGLE_DEG: f64 = 30.0;
/// Uniform cell reflection amplitude of the lossy-cell model.
pub const CELL_AMPLITUDE: f64 = 0.91;
/// Constant offset applied to measured path gains before comparison.
pub const MEASUREMENT_CORRECTION_DB: f64 = 5.5;
/// Tx–RIS distance of the path-gain setup.
pub const LINK_D1_M: f64 = 2.15;

/// Reflecting-surface variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RisSurface {
    Continuous,
    Quantized(u32),
    /// Flat conductor of the same size.
    Pec,
}

impl fmt::Display for RisSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RisSurface::Continuous => write!(f, "continuous"),
            RisSurface::Quantized(b) => write!(f, "{b}bit"),
            RisSurface::Pec => write!(f, "pec"),
        }
    }
}

impl FromStr for RisSurface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "continuous" | "cont" => return Ok(RisSurface::Continuous),
            "pec" => return Ok(RisSurface::Pec),
            _ => {}
        }
        let digits = t
            .strip_suffix("bit")
            .or_else(|| t.strip_suffix("-bit"))
            .map(|d| d.trim_end_matches('-'))
            .unwrap_or(&t);
        match digits.parse::<u32>() {
            Ok(b) if (1..=16).contains(&b) => Ok(RisSurface::Quantized(b)),
            _ => Err(Error::Argument(format!(
                "unknown surface '{s}', expected continuous, pec or <b>bit with b in 1..=16"
            ))),
        }
    }
}

impl TryFrom<String> for RisSurface {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RisSurface> for String {
    fn from(s: RisSurface) -> String {
        s.to_string()
    }
}

impl RisSurface {
    pub fn bits(&self) -> Option<u32> {
        match self {
            RisSurface::Quantized(b) => Some(*b),
            _ => None,
        }
    }
}

pub fn geometry() -> RisGeometry {
    RisGeometry::with_pitch(CELLS, CELLS, PITCH_M, FREQUENCY_HZ).expect("preset geometry is valid")
}

/// Surface profile for an arbitrary geometry steering normal incidence to `angle_deg`.
pub fn surface_profile(
    geometry: &RisGeometry,
    surface: RisSurface,
    angle_deg: f64,
    amplitude: f64,
) -> Result<PhaseProfile> {
    match surface {
        RisSurface::Pec => Ok(PhaseProfile::uniform(geometry.clone(), 0.0)),
        RisSurface::Continuous => {
            synthesize_gradient_phase(geometry, &ReflectionSpec::normal_to(angle_deg))?.with_uniform_amplitude(amplitude)
        }
        RisSurface::Quantized(b) => {
            let p = synthesize_gradient_phase(geometry, &ReflectionSpec::normal_to(angle_deg))?;
            quantize_phase(&p, b as i64)?.with_uniform_amplitude(amplitude)
        }
    }
}

/// The device profile: normal incidence steered to 30°, lossy cells.
pub fn profile(surface: RisSurface) -> PhaseProfile {
    surface_profile(&geometry(), surface, DESIGN_ANGLE_DEG, CELL_AMPLITUDE).expect("preset profile is valid")
}

/// Same phases with unit amplitude.
pub fn lossless_profile(surface: RisSurface) -> PhaseProfile {
    surface_profile(&geometry(), surface, DESIGN_ANGLE_DEG, 1.0).expect("preset profile is valid")
}

pub fn aperture() -> ApertureSpec {
    ApertureSpec::new(SIDE_M, crate::math::wavelength(FREQUENCY_HZ))
}

/// Reference main-beam RCS at 30° in dBsm.
pub fn reference_rcs_dbsm(bits: u32) -> Option<f64> {
    match bits {
        1 => Some(12.2),
        2 => Some(15.7),
        3 => Some(16.7),
        _ => None,
    }
}

/// Reference aperture efficiency.
pub fn reference_efficiency(bits: u32) -> Option<f64> {
    match bits {
        1 => Some(0.21),
        2 => Some(0.47),
        3 => Some(0.59),
        _ => None,
    }
}

/// Reference main-to-mirror beam ratio in dB.
pub fn reference_beam_ratio_db(bits: u32) -> Option<f64> {
    match bits {
        1 => Some(0.0),
        2 => Some(12.0),
        3 => Some(15.0),
        _ => None,
    }
}
