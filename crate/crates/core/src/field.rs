//! Physical-optics scattering from a phase profile by discrete Huygens-source
//! summation, plus RCS, aperture efficiency and pattern metrics.
//!
//! Each cell radiates `Γ·F(θ_in)·F(θ_obs)·ΔA/λ` with element factor
//! `F(θ) = cos^q θ` (zero behind the surface). With a unit incident field the
//! far-field sum `E` gives `σ = 4π|E|²`. Near-field samples are reported
//! range-normalized, `r·e^{-jkr}·E(p)`, so they converge to the far-field
//! value and share its scale.

use crate::error::{Error, Result};
use crate::math::{self, cis, CompensatedSum, Vec3};
use crate::synthesis::{Direction, PhaseProfile};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Observation distance model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldMode {
    FarField,
    NearField { distance: f64 },
}

/// Where and how a pattern is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSpec {
    pub mode: FieldMode,
    /// Azimuth of the scan plane in degrees.
    pub cut_deg: f64,
    /// Signed polar angles in degrees, strictly increasing.
    pub angles: Vec<f64>,
    pub incident: Direction,
    /// Element-factor exponent.
    #[serde(default = "default_q")]
    pub element_q: f64,
    /// Distance of a point source along the incident direction; plane wave if unset.
    #[serde(default)]
    pub source_distance: Option<f64>,
}

fn default_q() -> f64 {
    1.0
}

/// Inclusive angle grid `start..=stop` in steps of `step` degrees.
pub fn angle_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    let k0 = (start / step).round();
    if (k0 * step - start).abs() <= 1e-9 * step {
        // integer multiples of the step keep ±θ pairs exact negatives
        (0..=n).map(|i| (k0 + i as f64) * step).collect()
    } else {
        (0..=n).map(|i| start + i as f64 * step).collect()
    }
}

impl ObservationSpec {
    /// Far field, scan plane φ = 0, normal incidence.
    pub fn far_field(angles: Vec<f64>) -> Self {
        ObservationSpec {
            mode: FieldMode::FarField,
            cut_deg: 0.0,
            angles,
            incident: Direction::NORMAL,
            element_q: 1.0,
            source_distance: None,
        }
    }

    /// Near field at `distance` from the surface center, otherwise as `far_field`.
    pub fn near_field(distance: f64, angles: Vec<f64>) -> Self {
        ObservationSpec {
            mode: FieldMode::NearField { distance },
            ..Self::far_field(angles)
        }
    }

    /// Default metric grid: −90° to 90° in 0.05° steps.
    pub fn default_angles() -> Vec<f64> {
        angle_grid(-90.0, 90.0, 0.05)
    }

    pub fn validate(&self, profile: &PhaseProfile) -> Result<()> {
        if self.angles.is_empty() {
            return Err(Error::Observation("angle list is empty".into()));
        }
        if self.angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Observation("non-finite angle".into()));
        }
        if self.angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Observation("angles must be strictly increasing".into()));
        }
        if !(self.element_q >= 0.0 && self.element_q.is_finite()) {
            return Err(Error::Observation(format!(
                "element exponent must be >= 0, got {}",
                self.element_q
            )));
        }
        if self.incident.theta_deg.abs() >= 90.0 {
            return Err(Error::Observation("incident direction must be in front of the surface".into()));
        }
        if let FieldMode::NearField { distance } = self.mode {
            if !(distance.is_finite() && distance >= profile.geometry.pitch) {
                return Err(Error::Observation(format!(
                    "near-field distance {distance} m is smaller than one pitch ({} m)",
                    profile.geometry.pitch
                )));
            }
        }
        if let Some(d) = self.source_distance {
            if !(d.is_finite() && d >= profile.geometry.pitch) {
                return Err(Error::Observation(format!(
                    "source distance {d} m is smaller than one pitch"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Absolute,
    PeakNormalized,
}

/// Complex pattern samples with their power in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationPattern {
    pub spec: ObservationSpec,
    pub values: Vec<Complex64>,
    pub power_db: Vec<f64>,
    pub normalization: Normalization,
}

impl RadiationPattern {
    /// Power in dB of `|E|²`; absolute patterns are `4π|E|²`, i.e. dBsm.
    fn power_of(v: Complex64) -> f64 {
        math::pow_db(4.0 * PI * v.norm_sqr())
    }

    fn absolute(spec: ObservationSpec, values: Vec<Complex64>) -> Self {
        let power_db = values.iter().map(|&v| Self::power_of(v)).collect();
        RadiationPattern {
            spec,
            values,
            power_db,
            normalization: Normalization::Absolute,
        }
    }

    /// Pattern built from power samples only (zero phase), absolute.
    pub fn from_power_db(angles: Vec<f64>, power_db: &[f64]) -> Self {
        let values = power_db
            .iter()
            .map(|&p| Complex64::new((math::db_pow(p) / (4.0 * PI)).sqrt(), 0.0))
            .collect();
        Self::absolute(ObservationSpec::far_field(angles), values)
    }

    pub fn angles(&self) -> &[f64] {
        &self.spec.angles
    }

    /// Scales the pattern so its maximum is exactly 0 dB.
    pub fn peak_normalized(&self) -> Self {
        let peak = self
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
        let values: Vec<Complex64> = self.values.iter().map(|v| v * scale).collect();
        let mut power_db: Vec<f64> = values.iter().map(|v| math::pow_db(v.norm_sqr())).collect();
        if peak > 0.0 {
            // guard the maximum against rounding in the division
            let imax = argmax(&power_db);
            power_db[imax] = 0.0;
        }
        RadiationPattern {
            spec: self.spec.clone(),
            values,
            power_db,
            normalization: Normalization::PeakNormalized,
        }
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[inline]
fn element_factor(cos_theta: f64, q: f64) -> f64 {
    if cos_theta <= 0.0 {
        0.0
    } else if q == 1.0 {
        cos_theta
    } else {
        cos_theta.powf(q)
    }
}

/// Precomputed per-cell quantities shared by all observation points.
struct Aperture {
    gamma: Vec<Complex64>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    k: f64,
    /// `ΔA/λ`
    weight: f64,
}

impl Aperture {
    fn new(profile: &PhaseProfile) -> Self {
        let g = &profile.geometry;
        Aperture {
            gamma: profile.coefficients(),
            xs: (0..g.rows).map(|m| g.x_of(m)).collect(),
            ys: (0..g.cols).map(|n| g.y_of(n)).collect(),
            k: g.wavenumber(),
            weight: g.cell_area() / g.wavelength(),
        }
    }

    /// Per-cell illumination (amplitude and phase of the incident field at
    /// each cell, including the incidence element factor), row-major.
    fn illumination(&self, incident: Direction, q: f64, source: Option<f64>) -> Vec<Complex64> {
        let ui = incident.unit();
        let cols = self.ys.len();
        let mut out = Vec::with_capacity(self.gamma.len());
        for (m, &x) in self.xs.iter().enumerate() {
            for (n, &y) in self.ys.iter().enumerate() {
                let g = self.gamma[m * cols + n];
                let v = match source {
                    None => {
                        let f = element_factor(ui[2], q);
                        g * f * cis(-self.k * (ui[0] * x + ui[1] * y))
                    }
                    Some(d) => {
                        // spherical wave from d·u_in, unit amplitude and zero phase at the center
                        let s = math::scale(ui, d);
                        let rr = x * x + y * y;
                        let dr = (rr - 2.0 * (s[0] * x + s[1] * y)) / (path_len(s, x, y) + d);
                        let r = d + dr;
                        let f = element_factor(s[2] / r, q);
                        g * f * (d / r) * cis(self.k * dr)
                    }
                };
                out.push(v);
            }
        }
        out
    }

    /// Far field toward `uo` for a given illumination, separable in x and y.
    fn far(&self, illum: &[Complex64], uo: Vec3, q: f64) -> Complex64 {
        let fo = element_factor(uo[2], q);
        if fo == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let py: Vec<Complex64> = self.ys.iter().map(|&y| cis(-self.k * uo[1] * y)).collect();
        let cols = self.ys.len();
        let mut acc = CompensatedSum::new();
        for (m, &x) in self.xs.iter().enumerate() {
            let row = &illum[m * cols..(m + 1) * cols];
            let inner: CompensatedSum = row.iter().zip(&py).map(|(a, b)| a * b).collect();
            acc.add(inner.value() * cis(-self.k * uo[0] * x));
        }
        acc.value() * (fo * self.weight)
    }

    /// Range-normalized near field at local point `p` with `|p| = d`.
    fn near(&self, illum: &[Complex64], p: Vec3, q: f64) -> Complex64 {
        let d = math::norm(p);
        let cols = self.ys.len();
        let mut acc = CompensatedSum::new();
        for (m, &x) in self.xs.iter().enumerate() {
            for (n, &y) in self.ys.iter().enumerate() {
                let rr = x * x + y * y;
                let r = path_len(p, x, y);
                // R − d without cancellation
                let dr = (rr - 2.0 * (p[0] * x + p[1] * y)) / (r + d);
                let f = element_factor(p[2] / r, q);
                if f == 0.0 {
                    continue;
                }
                acc.add(illum[m * cols + n] * (f * d / r) * cis(self.k * dr));
            }
        }
        acc.value() * self.weight
    }

    /// Range-normalized near field of the phase-matched profile, i.e. the sum
    /// of cell magnitudes.
    fn near_matched(&self, illum: &[Complex64], p: Vec3, q: f64) -> f64 {
        let d = math::norm(p);
        let cols = self.ys.len();
        let mut acc = CompensatedSum::new();
        for (m, &x) in self.xs.iter().enumerate() {
            for (n, &y) in self.ys.iter().enumerate() {
                let r = path_len(p, x, y);
                let f = element_factor(p[2] / r, q);
                acc.add(Complex64::new(illum[m * cols + n].norm() * f * d / r, 0.0));
            }
        }
        acc.value().re * self.weight
    }

    fn far_matched(&self, illum: &[Complex64], uo: Vec3, q: f64) -> f64 {
        let fo = element_factor(uo[2], q);
        let s: CompensatedSum = illum.iter().map(|a| Complex64::new(a.norm(), 0.0)).collect();
        s.value().re * fo * self.weight
    }
}

#[inline]
fn path_len(p: Vec3, x: f64, y: f64) -> f64 {
    let dx = p[0] - x;
    let dy = p[1] - y;
    (dx * dx + dy * dy + p[2] * p[2]).sqrt()
}

fn check_profile(profile: &PhaseProfile) -> Result<()> {
    profile.validate()
}

/// Evaluates the scattered field over the observation grid.
pub fn compute_pattern(profile: &PhaseProfile, obs: &ObservationSpec) -> Result<RadiationPattern> {
    check_profile(profile)?;
    obs.validate(profile)?;
    let ap = Aperture::new(profile);
    let illum = ap.illumination(obs.incident, obs.element_q, obs.source_distance);
    let q = obs.element_q;
    let values: Vec<Complex64> = obs
        .angles
        .par_iter()
        .map(|&t| {
            let u = Direction::in_cut(t, obs.cut_deg).unit();
            match obs.mode {
                FieldMode::FarField => ap.far(&illum, u, q),
                FieldMode::NearField { distance } => ap.near(&illum, math::scale(u, distance), q),
            }
        })
        .collect();
    Ok(RadiationPattern::absolute(obs.clone(), values))
}

/// Far-field complex scattering amplitude toward one direction.
pub fn far_field_value(profile: &PhaseProfile, incident: Direction, outgoing: Direction, q: f64) -> Result<Complex64> {
    check_profile(profile)?;
    let ap = Aperture::new(profile);
    let illum = ap.illumination(incident, q, None);
    Ok(ap.far(&illum, outgoing.unit(), q))
}

/// Bistatic RCS in dBsm for one incident/outgoing pair.
pub fn bistatic_rcs_dbsm(profile: &PhaseProfile, incident: Direction, outgoing: Direction, q: f64) -> Result<f64> {
    let e = far_field_value(profile, incident, outgoing, q)?;
    Ok(math::pow_db(4.0 * PI * e.norm_sqr()))
}

/// Ratio of designed to phase-matched received power at a point, for both
/// the near field at `distance` and the far field in the same direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceRatios {
    pub near: f64,
    pub far: f64,
}

pub(crate) fn coherence_ratios(
    profile: &PhaseProfile,
    incident: Direction,
    outgoing: Direction,
    distance: f64,
    q: f64,
) -> Result<CoherenceRatios> {
    check_profile(profile)?;
    if !(distance.is_finite() && distance >= profile.geometry.pitch) {
        return Err(Error::Observation(format!(
            "distance {distance} m is smaller than one pitch ({} m)",
            profile.geometry.pitch
        )));
    }
    let ap = Aperture::new(profile);
    let illum = ap.illumination(incident, q, None);
    let u = outgoing.unit();
    let p = math::scale(u, distance);
    let en = ap.near(&illum, p, q).norm_sqr();
    let mn = ap.near_matched(&illum, p, q);
    let ef = ap.far(&illum, u, q).norm_sqr();
    let mf = ap.far_matched(&illum, u, q);
    if mn <= 0.0 || mf <= 0.0 {
        return Err(Error::Observation("observation point receives no power".into()));
    }
    Ok(CoherenceRatios {
        near: en / (mn * mn),
        far: ef / (mf * mf),
    })
}

/// RCS of a set of directions and the main-beam aperture efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcsReport {
    /// Keyed by the direction's polar angle in degrees.
    pub rcs_dbsm: BTreeMap<String, f64>,
    pub pec_reference_dbsm: f64,
    pub aperture_efficiency: f64,
    pub main_beam_deg: f64,
}

/// Map key used for a direction in `RcsReport::rcs_dbsm`.
pub fn direction_key(theta_deg: f64) -> String {
    format!("{theta_deg}")
}

impl RcsReport {
    pub fn at(&self, theta_deg: f64) -> Option<f64> {
        self.rcs_dbsm.get(&direction_key(theta_deg)).copied()
    }
}

/// Analytic RCS of a flat PEC plate of area `area` at normal incidence, `4πA²/λ²`, in dBsm.
pub fn pec_rcs_dbsm(area: f64, wavelength: f64) -> f64 {
    math::pow_db(4.0 * PI * area * area / (wavelength * wavelength))
}

/// Far-field RCS toward each θ (scan plane φ = 0) with `cos θ` element factors.
pub fn compute_rcs(profile: &PhaseProfile, directions: &[f64], incident: Direction) -> Result<RcsReport> {
    compute_rcs_with(profile, directions, incident, 0.0, 1.0)
}

pub fn compute_rcs_with(
    profile: &PhaseProfile,
    directions: &[f64],
    incident: Direction,
    cut_deg: f64,
    q: f64,
) -> Result<RcsReport> {
    if directions.is_empty() {
        return Err(Error::Observation("direction list is empty".into()));
    }
    check_profile(profile)?;
    let ap = Aperture::new(profile);
    let illum = ap.illumination(incident, q, None);
    let vals: Vec<f64> = directions
        .par_iter()
        .map(|&t| {
            let e = ap.far(&illum, Direction::in_cut(t, cut_deg).unit(), q);
            math::pow_db(4.0 * PI * e.norm_sqr())
        })
        .collect();
    let g = &profile.geometry;
    let pec = pec_rcs_dbsm(g.area(), g.wavelength());
    let imax = argmax(&vals);
    let rcs_dbsm = directions
        .iter()
        .zip(&vals)
        .map(|(&t, &v)| (direction_key(t), v))
        .collect();
    Ok(RcsReport {
        rcs_dbsm,
        pec_reference_dbsm: pec,
        aperture_efficiency: math::db_pow(vals[imax] - pec),
        main_beam_deg: directions[imax],
    })
}

/// Beam metrics extracted from a sampled pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub hpbw_deg: f64,
    /// Highest side lobe relative to the peak; `None` if the grid has no side lobe.
    pub sll_db: Option<f64>,
    pub peak_angle_deg: f64,
    /// Set when the angular step exceeds a quarter of the HPBW.
    pub grid_too_coarse: bool,
}

/// HPBW from interpolated −3 dB crossings, SLL outside the first minima.
pub fn pattern_metrics(pattern: &RadiationPattern) -> Result<PatternMetrics> {
    let p = &pattern.power_db;
    let a = pattern.angles();
    if p.len() < 3 || p.len() != a.len() {
        return Err(Error::Metric("pattern needs at least three samples".into()));
    }
    let ip = argmax(p);
    if ip == 0 || ip == p.len() - 1 {
        return Err(Error::Metric(format!(
            "peak at grid edge ({} deg); widen the angle grid",
            a[ip]
        )));
    }
    let peak = p[ip];
    let half = peak - 10.0 * 2f64.log10();
    let cross = |i: usize, j: usize| -> f64 {
        // linear interpolation in dB between samples i (above) and j (below)
        a[i] + (a[j] - a[i]) * (p[i] - half) / (p[i] - p[j])
    };
    let mut l = ip;
    while l > 0 && p[l - 1] >= half {
        l -= 1;
    }
    if l == 0 {
        return Err(Error::Metric("left -3 dB crossing outside grid".into()));
    }
    let mut r = ip;
    while r + 1 < p.len() && p[r + 1] >= half {
        r += 1;
    }
    if r + 1 == p.len() {
        return Err(Error::Metric("right -3 dB crossing outside grid".into()));
    }
    let hpbw = cross(r, r + 1) - cross(l, l - 1);

    let mut lm = ip;
    while lm > 0 && p[lm - 1] <= p[lm] {
        lm -= 1;
    }
    let mut rm = ip;
    while rm + 1 < p.len() && p[rm + 1] <= p[rm] {
        rm += 1;
    }
    let mut sll: Option<f64> = None;
    for i in (1..p.len() - 1).filter(|&i| i < lm || i > rm) {
        if p[i] >= p[i - 1] && p[i] > p[i + 1] {
            let rel = p[i] - peak;
            sll = Some(sll.map_or(rel, |s: f64| s.max(rel)));
        }
    }
    let step = a
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    Ok(PatternMetrics {
        hpbw_deg: hpbw,
        sll_db: sll,
        peak_angle_deg: a[ip],
        grid_too_coarse: step > hpbw / 4.0,
    })
}
