//! Tx–RIS–Rx path gain: the bistatic far-field radar formula and its
//! near-field correction `K²`, with sweeps against measured data.

use crate::error::{Error, Result};
use crate::math;
use crate::nearfield::{self, KOptions};
use crate::synthesis::PhaseProfile;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub d1: f64,
    pub d2: f64,
    pub rx_angle_deg: f64,
    pub wavelength: f64,
}

impl LinkGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("d1", self.d1), ("d2", self.d2), ("wavelength", self.wavelength)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Argument(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.rx_angle_deg.abs() >= 90.0 {
            return Err(Error::Argument(format!(
                "rx angle must be within (-90, 90) deg, got {}",
                self.rx_angle_deg
            )));
        }
        Ok(())
    }
}

/// `10·log10(σ·λ² / ((4π)³·d1²·d2²))`.
pub fn path_gain_ff(geom: &LinkGeometry, sigma_dbsm: f64) -> Result<f64> {
    geom.validate()?;
    if !sigma_dbsm.is_finite() {
        return Err(Error::Argument("sigma must be finite".into()));
    }
    let sigma = math::db_pow(sigma_dbsm);
    // d1·d2 first so that swapping the legs is bit-exact
    let dd = geom.d1 * geom.d2;
    let g = sigma * geom.wavelength * geom.wavelength / ((4.0 * PI).powi(3) * (dd * dd));
    Ok(math::pow_db(g))
}

/// Aperture used when evaluating K for the second leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KAperture {
    Physical,
    /// Central sub-aperture scaled by the aperture efficiency.
    Effective { efficiency: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NfffOptions {
    pub aperture: KAperture,
    pub k: KOptions,
}

impl Default for NfffOptions {
    fn default() -> Self {
        NfffOptions {
            aperture: KAperture::Physical,
            k: KOptions::default(),
        }
    }
}

impl NfffOptions {
    pub fn effective(efficiency: f64) -> Self {
        NfffOptions {
            aperture: KAperture::Effective { efficiency },
            k: KOptions::default(),
        }
    }
}

/// `20·log10 K(d2, θ)` for the configured aperture.
pub fn k_gain_db(profile: &PhaseProfile, d2: f64, rx_angle_deg: f64, opts: &NfffOptions) -> Result<f64> {
    let k = match opts.aperture {
        KAperture::Physical => nearfield::k_factor_with(profile, d2, rx_angle_deg, &opts.k)?,
        KAperture::Effective { efficiency } => {
            nearfield::k_factor_effective(profile, efficiency, d2, rx_angle_deg, &opts.k)?
        }
    };
    Ok(20.0 * k.log10())
}

/// Far-field path gain plus `20·log10 K(d2, θ)`.
pub fn path_gain_nfff(geom: &LinkGeometry, sigma_dbsm: f64, profile: &PhaseProfile, opts: &NfffOptions) -> Result<f64> {
    let ff = path_gain_ff(geom, sigma_dbsm)?;
    Ok(ff + k_gain_db(profile, geom.d2, geom.rx_angle_deg, opts)?)
}

/// One measured path gain at a given RIS–Rx distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub d2: f64,
    pub gain_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPoint {
    pub d2: f64,
    pub p_ff_db: f64,
    pub p_nfff_db: f64,
    pub measured_db: Option<f64>,
    pub measured_corrected_db: Option<f64>,
    /// Corrected measurement minus the near-/far-field model.
    pub residual_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetSweep {
    pub points: Vec<LinkPoint>,
    pub sigma_dbsm: f64,
    pub correction_db: f64,
}

/// Evaluates both models at every distance in `d2_list` and at every
/// measured distance, attaching corrected measurements and residuals.
pub fn sweep_and_compare(
    template: &LinkGeometry,
    d2_list: &[f64],
    sigma_dbsm: f64,
    profile: &PhaseProfile,
    measurements: Option<&[Measurement]>,
    correction_db: f64,
    opts: &NfffOptions,
) -> Result<LinkBudgetSweep> {
    if d2_list.is_empty() {
        return Err(Error::Argument("d2 list is empty".into()));
    }
    if let Some(d) = d2_list.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::Argument(format!("d2 values must be > 0, got {d}")));
    }
    if !correction_db.is_finite() {
        return Err(Error::Argument("correction must be finite".into()));
    }
    let meas = measurements.unwrap_or(&[]);
    if let Some(m) = meas.iter().find(|m| !(m.d2 > 0.0 && m.d2.is_finite() && m.gain_db.is_finite())) {
        return Err(Error::Argument(format!("invalid measurement at d2 = {}", m.d2)));
    }
    let mut grid: Vec<f64> = d2_list.iter().copied().chain(meas.iter().map(|m| m.d2)).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let points = grid
        .par_iter()
        .map(|&d2| {
            let g = LinkGeometry { d2, ..*template };
            let p_ff_db = path_gain_ff(&g, sigma_dbsm)?;
            let p_nfff_db = p_ff_db + k_gain_db(profile, d2, g.rx_angle_deg, opts)?;
            let measured_db = meas.iter().find(|m| m.d2 == d2).map(|m| m.gain_db);
            let measured_corrected_db = measured_db.map(|m| m + correction_db);
            Ok(LinkPoint {
                d2,
                p_ff_db,
                p_nfff_db,
                measured_db,
                measured_corrected_db,
                residual_db: measured_corrected_db.map(|m| m - p_nfff_db),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkBudgetSweep {
        points,
        sigma_dbsm,
        correction_db,
    })
}
