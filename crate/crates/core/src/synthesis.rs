//! Phase-profile synthesis and uniform b-bit quantization for a planar RIS.
//!
//! Sign convention, used by every module of the crate: a cell reflects with
//! `Γ = a·e^{jφ}` and waves propagate as `e^{+jkr}`. Incidence directions are
//! arrival directions (pointing from the surface toward the source), outgoing
//! directions point from the surface toward the observer. A profile that
//! re-radiates a wave arriving from `u_in` coherently toward `u_out` therefore
//! has `φ(r) = k·(u_in + u_out)·r mod 2π`, with `r` measured from the surface
//! center. Specular reflection needs no gradient.

use crate::error::{Error, Result};
use crate::math::{self, cis, Vec3, TWO_PI};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Planar M×N RIS with uniform pitch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Inter-cell spacing in meters.
    pub pitch: f64,
    pub frequency: f64,
    /// Declared physical side length, used for boundary formulas when the
    /// cell lattice does not span the nominal aperture exactly.
    #[serde(default)]
    pub side_override: Option<f64>,
    #[serde(default)]
    pub center: Vec3,
    #[serde(default = "default_normal")]
    pub normal: Vec3,
}

fn default_normal() -> Vec3 {
    [0.0, 0.0, 1.0]
}

impl RisGeometry {
    /// Square-lattice geometry at half-wavelength pitch.
    pub fn new(rows: usize, cols: usize, frequency: f64) -> Result<Self> {
        let pitch = math::wavelength(frequency) / 2.0;
        Self::with_pitch(rows, cols, pitch, frequency)
    }

    pub fn with_pitch(rows: usize, cols: usize, pitch: f64, frequency: f64) -> Result<Self> {
        let g = RisGeometry {
            rows,
            cols,
            pitch,
            frequency,
            side_override: None,
            center: [0.0; 3],
            normal: default_normal(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Geometry("rows and cols must be at least 1".into()));
        }
        if !(self.pitch > 0.0 && self.pitch.is_finite()) {
            return Err(Error::Geometry(format!("pitch must be > 0, got {}", self.pitch)));
        }
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::Geometry(format!(
                "frequency must be > 0, got {}",
                self.frequency
            )));
        }
        if let Some(s) = self.side_override {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Geometry(format!("side_override must be > 0, got {s}")));
            }
        }
        let n = math::norm(self.normal);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Geometry("normal must be a non-zero vector".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        math::wavelength(self.frequency)
    }

    pub fn wavenumber(&self) -> f64 {
        math::wavenumber(self.frequency)
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell_area(&self) -> f64 {
        self.pitch * self.pitch
    }

    /// Total lattice area, `M·N·pitch²`.
    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.cell_area()
    }

    /// Physical side length: the declared override, else the larger lattice side.
    pub fn side_length(&self) -> f64 {
        self.side_override
            .unwrap_or(self.rows.max(self.cols) as f64 * self.pitch)
    }

    /// In-plane x coordinate of row `m`.
    #[inline]
    pub fn x_of(&self, m: usize) -> f64 {
        (m as f64 - (self.rows as f64 - 1.0) / 2.0) * self.pitch
    }

    /// In-plane y coordinate of column `n`.
    #[inline]
    pub fn y_of(&self, n: usize) -> f64 {
        (n as f64 - (self.cols as f64 - 1.0) / 2.0) * self.pitch
    }

    /// Local frame `(x̂, ŷ, n̂)` in world coordinates. `x̂` is horizontal
    /// (perpendicular to world z and the normal) unless the surface faces
    /// straight up or down, in which case it is world x.
    pub fn frame(&self) -> [Vec3; 3] {
        let n = math::normalize(self.normal);
        let up = [0.0, 0.0, 1.0];
        let c = math::cross(up, n);
        let x = if math::norm(c) < 1e-12 {
            [1.0, 0.0, 0.0]
        } else {
            math::normalize(c)
        };
        let y = math::cross(n, x);
        [x, y, n]
    }

    /// World position of a world point expressed in the local frame.
    pub fn to_local(&self, p: Vec3) -> Vec3 {
        let [x, y, n] = self.frame();
        let d = math::sub(p, self.center);
        [math::dot(d, x), math::dot(d, y), math::dot(d, n)]
    }

    /// World coordinates of a local-frame point.
    pub fn to_world(&self, l: Vec3) -> Vec3 {
        let [x, y, n] = self.frame();
        math::add(
            self.center,
            math::add(
                math::add(math::scale(x, l[0]), math::scale(y, l[1])),
                math::scale(n, l[2]),
            ),
        )
    }
}

/// Direction in the surface frame: polar angle from the normal and azimuth
/// from local x, both in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta_deg: f64,
    #[serde(default)]
    pub phi_deg: f64,
}

impl Direction {
    pub const NORMAL: Direction = Direction {
        theta_deg: 0.0,
        phi_deg: 0.0,
    };

    pub fn new(theta_deg: f64, phi_deg: f64) -> Self {
        Direction { theta_deg, phi_deg }
    }

    /// Signed angle in a scan plane of azimuth `cut_deg`; negative angles lie
    /// on the opposite half-plane.
    pub fn in_cut(theta_deg: f64, cut_deg: f64) -> Self {
        Direction {
            theta_deg,
            phi_deg: cut_deg,
        }
    }

    pub fn unit(&self) -> Vec3 {
        let (st, ct) = self.theta_deg.to_radians().sin_cos();
        let (sp, cp) = self.phi_deg.to_radians().sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Direction of a local-frame vector.
    pub fn from_local(v: Vec3) -> Self {
        let r = math::norm(v);
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos().to_degrees();
        let phi = v[1].atan2(v[0]).to_degrees();
        Direction {
            theta_deg: theta,
            phi_deg: phi.rem_euclid(360.0),
        }
    }

    fn validate_hemisphere(&self, what: &str) -> Result<()> {
        if !self.theta_deg.is_finite() || !self.phi_deg.is_finite() {
            return Err(Error::Direction(format!("{what}: non-finite angle")));
        }
        if self.theta_deg.abs() >= 90.0 {
            return Err(Error::Direction(format!(
                "{what}: |theta| must be < 90 deg, got {}",
                self.theta_deg
            )));
        }
        Ok(())
    }
}

/// Prescribed anomalous reflection: arrival direction of the incident wave
/// and departure direction of the re-radiated wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionSpec {
    pub incident: Direction,
    pub outgoing: Direction,
}

impl ReflectionSpec {
    /// Normal incidence steered to `theta_out` in the local x–z plane.
    pub fn normal_to(theta_out_deg: f64) -> Self {
        ReflectionSpec {
            incident: Direction::NORMAL,
            outgoing: Direction::new(theta_out_deg, 0.0),
        }
    }
}

/// Per-cell reflection phase and amplitude, row-major (`m·N + n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub geometry: RisGeometry,
    pub phase: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub quantization_bits: Option<u32>,
}

impl PhaseProfile {
    /// Uniform profile with the given phase and unit amplitude.
    pub fn uniform(geometry: RisGeometry, phase: f64) -> Self {
        let n = geometry.cell_count();
        PhaseProfile {
            geometry,
            phase: vec![math::wrap_phase(phase); n],
            amplitude: vec![1.0; n],
            quantization_bits: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        let n = self.geometry.cell_count();
        if self.phase.len() != n || self.amplitude.len() != n {
            return Err(Error::Geometry(format!(
                "profile has {} phases and {} amplitudes for {} cells",
                self.phase.len(),
                self.amplitude.len(),
                n
            )));
        }
        if let Some(a) = self
            .amplitude
            .iter()
            .find(|a| !(0.0..=1.0).contains(*a))
        {
            return Err(Error::Geometry(format!("amplitude {a} outside [0, 1]")));
        }
        if let Some(p) = self.phase.iter().find(|p| !(0.0..TWO_PI).contains(*p)) {
            return Err(Error::Geometry(format!("phase {p} outside [0, 2pi)")));
        }
        Ok(())
    }

    #[inline]
    pub fn index(&self, m: usize, n: usize) -> usize {
        m * self.geometry.cols + n
    }

    pub fn phase_at(&self, m: usize, n: usize) -> f64 {
        self.phase[self.index(m, n)]
    }

    /// Complex reflection coefficients, row-major.
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.phase
            .iter()
            .zip(&self.amplitude)
            .map(|(&p, &a)| cis(p) * a)
            .collect()
    }

    /// Replaces every amplitude with `a` (lossy-cell emulation).
    pub fn with_uniform_amplitude(mut self, a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Geometry(format!("amplitude {a} outside [0, 1]")));
        }
        self.amplitude.iter_mut().for_each(|x| *x = a);
        Ok(self)
    }

    /// Central `rows × cols` sub-aperture, same pitch and frequency.
    pub fn crop_center(&self, rows: usize, cols: usize) -> Result<Self> {
        let g = &self.geometry;
        if rows == 0 || cols == 0 || rows > g.rows || cols > g.cols {
            return Err(Error::Geometry(format!(
                "cannot crop {rows}x{cols} from {}x{}",
                g.rows, g.cols
            )));
        }
        let m0 = (g.rows - rows) / 2;
        let n0 = (g.cols - cols) / 2;
        let mut phase = Vec::with_capacity(rows * cols);
        let mut amplitude = Vec::with_capacity(rows * cols);
        for m in m0..m0 + rows {
            for n in n0..n0 + cols {
                phase.push(self.phase_at(m, n));
                amplitude.push(self.amplitude[self.index(m, n)]);
            }
        }
        let mut geometry = g.clone();
        geometry.rows = rows;
        geometry.cols = cols;
        geometry.side_override = None;
        Ok(PhaseProfile {
            geometry,
            phase,
            amplitude,
            quantization_bits: self.quantization_bits,
        })
    }

    /// Sub-aperture whose area is `efficiency` times the full lattice.
    pub fn effective_aperture(&self, efficiency: f64) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::Argument(format!(
                "aperture efficiency must be in (0, 1], got {efficiency}"
            )));
        }
        let s = efficiency.sqrt();
        let rows = ((self.geometry.rows as f64 * s).round() as usize).max(1);
        let cols = ((self.geometry.cols as f64 * s).round() as usize).max(1);
        self.crop_center(rows, cols)
    }
}

/// Continuous phase-gradient profile realizing `spec`, unit amplitude.
pub fn synthesize_gradient_phase(geometry: &RisGeometry, spec: &ReflectionSpec) -> Result<PhaseProfile> {
    geometry.validate()?;
    spec.incident.validate_hemisphere("incident direction")?;
    spec.outgoing.validate_hemisphere("outgoing direction")?;
    let k = geometry.wavenumber();
    let ui = spec.incident.unit();
    let uo = spec.outgoing.unit();
    let gx = k * (ui[0] + uo[0]);
    let gy = k * (ui[1] + uo[1]);
    let mut phase = Vec::with_capacity(geometry.cell_count());
    for m in 0..geometry.rows {
        let x = geometry.x_of(m);
        for n in 0..geometry.cols {
            let y = geometry.y_of(n);
            phase.push(math::wrap_phase(gx * x + gy * y));
        }
    }
    Ok(PhaseProfile {
        geometry: geometry.clone(),
        phase,
        amplitude: vec![1.0; geometry.cell_count()],
        quantization_bits: None,
    })
}

/// Index of the nearest of `2^bits` uniform levels, ties to the lower level.
#[inline]
pub(crate) fn level_index(phase: f64, bits: u32) -> u64 {
    let levels = 1u64 << bits;
    let step = TWO_PI / levels as f64;
    let idx = (phase / step - 0.5 - 1e-9).ceil() as i64;
    idx.rem_euclid(levels as i64) as u64
}

pub(crate) fn check_bits(bits: i64) -> Result<u32> {
    if !(1..=16).contains(&bits) {
        return Err(Error::Quantization(format!(
            "bits must be in 1..=16, got {bits}"
        )));
    }
    Ok(bits as u32)
}

/// Snaps every phase to the nearest of `2^bits` levels `2πk/2^bits`.
pub fn quantize_phase(profile: &PhaseProfile, bits: i64) -> Result<PhaseProfile> {
    let bits = check_bits(bits)?;
    let step = TWO_PI / (1u64 << bits) as f64;
    let phase = profile
        .phase
        .iter()
        .map(|&p| level_index(math::wrap_phase(p), bits) as f64 * step)
        .collect();
    Ok(PhaseProfile {
        geometry: profile.geometry.clone(),
        phase,
        amplitude: profile.amplitude.clone(),
        quantization_bits: Some(bits),
    })
}

/// Main-beam gain change of uniform b-bit quantization, `20·log10(sinc(π/2^b))`.
pub fn quantization_loss_theoretical(bits: i64) -> Result<f64> {
    let bits = check_bits(bits)?;
    let x = std::f64::consts::PI / (1u64 << bits) as f64;
    Ok(20.0 * (x.sin() / x).log10())
}
