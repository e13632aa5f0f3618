//! Image-method multipath simulation of a rectangular room with a RIS, a
//! line-of-sight blocker and rotating horn antennas, producing multipath
//! component lists and power angular profiles (PAPs).
//!
//! The room is planar: walls are the lines `x = 0`, `x = width`, `y = 0`
//! and `y = length`, and every antenna shares one mount height. Azimuths are
//! `atan2(dx, dy)`, i.e. clockwise-positive when viewed from above. Departure
//! and arrival angles are measured from each horn's initial, RIS-facing
//! direction.

use crate::error::{Error, Result};
use crate::field;
use crate::link::{self, LinkGeometry};
use crate::math::{self, cis, Vec3, SPEED_OF_LIGHT};
use crate::nearfield::{self, ApertureSpec, KOptions};
use crate::presets::{self, RisSurface};
use crate::synthesis::{Direction, PhaseProfile, RisGeometry};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Room {
    /// Extent along x in meters.
    pub width: f64,
    /// Extent along y in meters.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub position: Point,
    pub mount_height: f64,
    /// Rotation of the initial pointing direction away from the RIS, degrees clockwise.
    #[serde(default)]
    pub pointing_offset_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisPlacement {
    pub position: Point,
    /// Horizontal surface normal (need not be unit length).
    pub normal: Point,
    pub rows: usize,
    pub cols: usize,
    pub pitch: f64,
    /// Design steering angle for normal incidence, degrees.
    pub design_angle_deg: f64,
    #[serde(default = "one")]
    pub cell_amplitude: f64,
    pub surface: RisSurface,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blocker {
    pub a: Point,
    pub b: Point,
    #[serde(default = "default_blocker_db")]
    pub attenuation_db: f64,
}

fn default_blocker_db() -> f64 {
    40.0
}

/// Rotationally symmetric Gaussian horn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horn {
    pub gain_dbi: f64,
    pub hpbw_deg: f64,
}

impl Default for Horn {
    fn default() -> Self {
        Horn {
            gain_dbi: 26.4,
            hpbw_deg: 8.5,
        }
    }
}

impl Horn {
    /// Gain in dBi at `offset_deg` from boresight.
    pub fn gain_db(&self, offset_deg: f64) -> f64 {
        let u = offset_deg / self.hpbw_deg;
        self.gain_dbi - 12.0 * u * u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomScenario {
    pub room: Room,
    pub frequency_hz: f64,
    pub tx: Terminal,
    pub rx: Terminal,
    pub ris: RisPlacement,
    #[serde(default)]
    pub blocker: Option<Blocker>,
    #[serde(default = "default_wall_loss")]
    pub wall_loss_db: f64,
    #[serde(default)]
    pub horn: Horn,
    #[serde(default = "default_noise_floor")]
    pub noise_floor_db: f64,
    #[serde(default = "default_order")]
    pub max_order: usize,
    /// Include single wall bounces before or after the RIS.
    #[serde(default = "yes")]
    pub ris_wall_paths: bool,
}

fn default_wall_loss() -> f64 {
    10.0
}

fn default_noise_floor() -> f64 {
    -200.0
}

fn default_order() -> usize {
    1
}

fn yes() -> bool {
    true
}

const DEFAULT_ROOM_JSON: &str = include_str!("../data/default_room.json");

impl RoomScenario {
    /// The shipped default room scenario.
    pub fn default_room() -> Self {
        serde_json::from_str(DEFAULT_ROOM_JSON).expect("embedded scenario parses")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sc: RoomScenario = serde_json::from_str(s)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn with_surface(mut self, surface: RisSurface) -> Self {
        self.ris.surface = surface;
        self
    }

    fn inside(&self, p: Point) -> bool {
        let e = 1e-9;
        p[0] > e && p[0] < self.room.width - e && p[1] > e && p[1] < self.room.length - e
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.room;
        if !(r.width > 0.0 && r.length > 0.0 && r.width.is_finite() && r.length.is_finite()) {
            return Err(Error::Scenario("room dimensions must be > 0".into()));
        }
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(Error::Scenario("frequency must be > 0".into()));
        }
        for (name, p) in [("tx", self.tx.position), ("rx", self.rx.position), ("ris", self.ris.position)] {
            if !self.inside(p) {
                return Err(Error::Scenario(format!(
                    "{name} at ({}, {}) is not strictly inside the room",
                    p[0], p[1]
                )));
            }
        }
        if (self.tx.mount_height - self.rx.mount_height).abs() > 1e-9 {
            return Err(Error::Scenario("tx and rx mount heights must be equal".into()));
        }
        if !(self.wall_loss_db >= 0.0 && self.wall_loss_db.is_finite()) {
            return Err(Error::Scenario("wall loss must be >= 0 dB".into()));
        }
        if let Some(b) = &self.blocker {
            if !(b.attenuation_db >= 0.0 && b.attenuation_db.is_finite()) {
                return Err(Error::Scenario("blocker attenuation must be >= 0 dB".into()));
            }
        }
        if !(self.horn.hpbw_deg > 0.0) {
            return Err(Error::Scenario("horn HPBW must be > 0".into()));
        }
        if self.max_order == 0 {
            return Err(Error::Scenario("max_order must be >= 1".into()));
        }
        let n = self.ris.normal;
        if !(n[0].hypot(n[1]) > 0.0) {
            return Err(Error::Scenario("RIS normal must be non-zero".into()));
        }
        if !(0.0..=1.0).contains(&self.ris.cell_amplitude) {
            return Err(Error::Scenario("cell amplitude must be in [0, 1]".into()));
        }
        let g = self.ris_geometry()?;
        for (name, p) in [("tx", self.tx.position), ("rx", self.rx.position)] {
            if g.to_local(self.lift(p))[2] <= 0.0 {
                return Err(Error::Scenario(format!("{name} is behind the RIS")));
            }
        }
        Ok(())
    }

    fn lift(&self, p: Point) -> Vec3 {
        [p[0], p[1], self.tx.mount_height]
    }

    pub fn ris_geometry(&self) -> Result<RisGeometry> {
        let mut g = RisGeometry::with_pitch(self.ris.rows, self.ris.cols, self.ris.pitch, self.frequency_hz)?;
        g.center = self.lift(self.ris.position);
        g.normal = [self.ris.normal[0], self.ris.normal[1], 0.0];
        Ok(g)
    }

    pub fn ris_profile(&self) -> Result<PhaseProfile> {
        presets::surface_profile(
            &self.ris_geometry()?,
            self.ris.surface,
            self.ris.design_angle_deg,
            self.ris.cell_amplitude,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    /// `x = 0`
    West,
    /// `x = width`
    East,
    /// `y = 0`
    South,
    /// `y = length`
    North,
}

const WALLS: [Wall; 4] = [Wall::West, Wall::East, Wall::South, Wall::North];

impl Wall {
    fn mirror(self, room: &Room, p: Point) -> Point {
        match self {
            Wall::West => [-p[0], p[1]],
            Wall::East => [2.0 * room.width - p[0], p[1]],
            Wall::South => [p[0], -p[1]],
            Wall::North => [p[0], 2.0 * room.length - p[1]],
        }
    }

    /// Point where segment `a→b` crosses the wall line, if it lies on the wall.
    fn hit(self, room: &Room, a: Point, b: Point) -> Option<Point> {
        let (axis, level, extent) = match self {
            Wall::West => (0, 0.0, room.length),
            Wall::East => (0, room.width, room.length),
            Wall::South => (1, 0.0, room.width),
            Wall::North => (1, room.length, room.width),
        };
        let da = b[axis] - a[axis];
        if da == 0.0 {
            return None;
        }
        let t = (level - a[axis]) / da;
        if !(t > 0.0 && t < 1.0) {
            return None;
        }
        let other = 1 - axis;
        let v = a[other] + t * (b[other] - a[other]);
        if !(0.0..=extent).contains(&v) {
            return None;
        }
        let mut p = [0.0; 2];
        p[axis] = level;
        p[other] = v;
        Some(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PathKind {
    Direct,
    WallReflection { walls: Vec<Wall>, order: usize },
    RisReflection,
    /// One wall bounce before (`before_ris`) or after the RIS.
    RisWall { wall: Wall, before_ris: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathComponent {
    pub kind: PathKind,
    pub aod_deg: f64,
    pub aoa_deg: f64,
    pub delay_s: f64,
    pub gain_db: f64,
    pub length_m: f64,
    /// Tx, interaction points, Rx.
    pub vertices: Vec<Point>,
    /// Number of blocker crossings.
    pub blocked: usize,
}

/// Clockwise azimuth of `to − from` in degrees.
pub fn azimuth_deg(from: Point, to: Point) -> f64 {
    (to[0] - from[0]).atan2(to[1] - from[1]).to_degrees()
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn segments_cross(p: Point, q: Point, a: Point, b: Point) -> bool {
    let orient = |u: Point, v: Point, w: Point| (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0]);
    let d1 = orient(a, b, p);
    let d2 = orient(a, b, q);
    let d3 = orient(p, q, a);
    let d4 = orient(p, q, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Free-space path gain `(λ/4πd)²` in dB.
pub fn free_space_gain_db(length: f64, wavelength: f64) -> f64 {
    20.0 * (wavelength / (4.0 * PI * length)).log10()
}

impl PathComponent {
    /// Departure and arrival angles recomputed from the stored vertices.
    pub fn angles_from_vertices(&self, scenario: &RoomScenario) -> (f64, f64) {
        let v = &self.vertices;
        let n = v.len();
        let ris = scenario.ris.position;
        let aod = math::wrap_deg(
            azimuth_deg(v[0], v[1]) - azimuth_deg(scenario.tx.position, ris) - scenario.tx.pointing_offset_deg,
        );
        let aoa = math::wrap_deg(
            azimuth_deg(v[n - 1], v[n - 2]) - azimuth_deg(scenario.rx.position, ris) - scenario.rx.pointing_offset_deg,
        );
        (aod, aoa)
    }

    pub fn is_ris(&self) -> bool {
        matches!(self.kind, PathKind::RisReflection)
    }

    /// Complex baseband amplitude including the carrier phase of the delay.
    pub fn amplitude(&self, frequency_hz: f64) -> Complex64 {
        cis(-math::TWO_PI * frequency_hz * self.delay_s) * 10f64.powf(self.gain_db / 20.0)
    }
}

struct Tracer<'a> {
    sc: &'a RoomScenario,
    lam: f64,
    geometry: RisGeometry,
    profile: PhaseProfile,
    rayleigh: f64,
}

impl<'a> Tracer<'a> {
    fn new(sc: &'a RoomScenario) -> Result<Self> {
        let geometry = sc.ris_geometry()?;
        let profile = sc.ris_profile()?;
        let lam = math::wavelength(sc.frequency_hz);
        let rayleigh = nearfield::boundaries(&ApertureSpec::new(geometry.side_length(), lam), 0.0)?.rayleigh_m;
        Ok(Tracer {
            sc,
            lam,
            geometry,
            profile,
            rayleigh,
        })
    }

    fn blocked(&self, v: &[Point]) -> usize {
        match &self.sc.blocker {
            None => 0,
            Some(b) => v.windows(2).filter(|s| segments_cross(s[0], s[1], b.a, b.b)).count(),
        }
    }

    fn blocker_db(&self, crossings: usize) -> f64 {
        self.sc.blocker.map_or(0.0, |b| b.attenuation_db) * crossings as f64
    }

    fn component(&self, kind: PathKind, vertices: Vec<Point>, gain_db: f64) -> PathComponent {
        let length_m: f64 = vertices.windows(2).map(|s| dist(s[0], s[1])).sum();
        let blocked = self.blocked(&vertices);
        let mut c = PathComponent {
            kind,
            aod_deg: 0.0,
            aoa_deg: 0.0,
            delay_s: length_m / SPEED_OF_LIGHT,
            gain_db: gain_db - self.blocker_db(blocked),
            length_m,
            vertices,
            blocked,
        };
        let (aod, aoa) = c.angles_from_vertices(self.sc);
        c.aod_deg = aod;
        c.aoa_deg = aoa;
        c
    }

    fn wall_paths(&self, out: &mut Vec<PathComponent>) {
        let room = &self.sc.room;
        let tx = self.sc.tx.position;
        let rx = self.sc.rx.position;
        let mut seqs: Vec<Vec<Wall>> = WALLS.iter().map(|&w| vec![w]).collect();
        let mut all = seqs.clone();
        for _ in 1..self.sc.max_order {
            let mut next = Vec::new();
            for s in &seqs {
                for &w in &WALLS {
                    if *s.last().unwrap() != w {
                        let mut t = s.clone();
                        t.push(w);
                        next.push(t);
                    }
                }
            }
            all.extend(next.iter().cloned());
            seqs = next;
        }
        for walls in all {
            let mut images = vec![tx];
            for &w in &walls {
                let last = *images.last().unwrap();
                images.push(w.mirror(room, last));
            }
            // trace back from the receiver through the images
            let mut pts = vec![rx];
            let mut ok = true;
            for (i, &w) in walls.iter().enumerate().rev() {
                let from = *pts.last().unwrap();
                match w.hit(room, from, images[i + 1]) {
                    Some(p) => pts.push(p),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            pts.push(tx);
            pts.reverse();
            let length: f64 = pts.windows(2).map(|s| dist(s[0], s[1])).sum();
            let order = walls.len();
            let gain = free_space_gain_db(length, self.lam) - self.sc.wall_loss_db * order as f64;
            out.push(self.component(PathKind::WallReflection { walls, order }, pts, gain));
        }
    }

    /// Signed in-plane angle of a world point seen from the surface, or `None` behind it.
    fn surface_angle(&self, p: Point) -> Option<f64> {
        let l = self.geometry.to_local(self.sc.lift(p));
        if l[2] <= 0.0 {
            return None;
        }
        Some(l[0].atan2(l[2]).to_degrees())
    }

    fn sigma_dbsm(&self, theta_in: f64, theta_out: f64) -> Result<f64> {
        field::bistatic_rcs_dbsm(
            &self.profile,
            Direction::in_cut(theta_in, 0.0),
            Direction::in_cut(theta_out, 0.0),
            1.0,
        )
    }

    /// Eq. (1) gain between an (image) source and (image) sink via the surface.
    fn ris_gain(&self, src: Point, dst: Point, near_field: bool) -> Result<Option<f64>> {
        let c = self.sc.ris.position;
        let (Some(ti), Some(to)) = (self.surface_angle(src), self.surface_angle(dst)) else {
            return Ok(None);
        };
        let d1 = dist(src, c);
        let d2 = dist(c, dst);
        let sigma = self.sigma_dbsm(ti, to)?;
        let geom = LinkGeometry {
            d1,
            d2,
            rx_angle_deg: to,
            wavelength: self.lam,
        };
        let mut g = link::path_gain_ff(&geom, sigma)?;
        if near_field && self.sc.ris.surface != RisSurface::Pec && d2 < self.rayleigh {
            let opts = KOptions {
                incident: Direction::in_cut(ti, 0.0),
                ..KOptions::default()
            };
            let k = nearfield::k_factor_with(&self.profile, d2, to, &opts)?;
            g += 20.0 * k.log10();
        }
        // a passive reflector cannot beat free space over the unfolded path
        Ok(Some(g.min(free_space_gain_db(d1 + d2, self.lam))))
    }

    fn ris_paths(&self, out: &mut Vec<PathComponent>) -> Result<()> {
        let tx = self.sc.tx.position;
        let rx = self.sc.rx.position;
        let c = self.sc.ris.position;
        if let Some(g) = self.ris_gain(tx, rx, true)? {
            out.push(self.component(PathKind::RisReflection, vec![tx, c, rx], g));
        }
        if !self.sc.ris_wall_paths {
            return Ok(());
        }
        let room = &self.sc.room;
        for &w in &WALLS {
            // Tx → wall → RIS → Rx
            let img = w.mirror(room, tx);
            if let Some(p) = w.hit(room, c, img) {
                if let Some(g) = self.ris_gain(img, rx, false)? {
                    let kind = PathKind::RisWall { wall: w, before_ris: true };
                    out.push(self.component(kind, vec![tx, p, c, rx], g - self.sc.wall_loss_db));
                }
            }
            // Tx → RIS → wall → Rx
            let img = w.mirror(room, rx);
            if let Some(p) = w.hit(room, c, img) {
                if let Some(g) = self.ris_gain(tx, img, false)? {
                    let kind = PathKind::RisWall { wall: w, before_ris: false };
                    out.push(self.component(kind, vec![tx, c, p, rx], g - self.sc.wall_loss_db));
                }
            }
        }
        Ok(())
    }
}

/// All specular wall paths up to `max_order`, the direct path, the RIS path
/// and (optionally) single wall bounces before or after the RIS.
pub fn trace_components(scenario: &RoomScenario, max_order: usize) -> Result<Vec<PathComponent>> {
    scenario.validate()?;
    if max_order == 0 {
        return Err(Error::Scenario("max_order must be >= 1".into()));
    }
    let sc = RoomScenario {
        max_order,
        ..scenario.clone()
    };
    let t = Tracer::new(&sc)?;
    let tx = sc.tx.position;
    let rx = sc.rx.position;
    let mut out = vec![t.component(
        PathKind::Direct,
        vec![tx, rx],
        free_space_gain_db(dist(tx, rx), t.lam),
    )];
    t.wall_paths(&mut out);
    t.ris_paths(&mut out)?;
    Ok(out)
}

/// Power received for every (AoD, AoA) pointing pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PapMatrix {
    pub aod_grid: Vec<f64>,
    pub aoa_grid: Vec<f64>,
    /// Row per AoD, column per AoA, dB.
    pub power_db: Vec<Vec<f64>>,
    pub components: Vec<PathComponent>,
}

/// `360/step` angles in (−180°, 180°].
pub fn periodic_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0 && step_deg <= 360.0) {
        return Err(Error::Argument(format!("grid step must be in (0, 360], got {step_deg}")));
    }
    let n = (360.0 / step_deg).round() as usize;
    Ok((1..=n).map(|i| -180.0 + i as f64 * step_deg).collect())
}

/// Coherent sum of all components weighted by both horn patterns, plus the noise floor.
pub fn pap_from_components(
    components: &[PathComponent],
    horn: &Horn,
    frequency_hz: f64,
    noise_floor_db: f64,
    aod_grid: &[f64],
    aoa_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if aod_grid.is_empty() || aoa_grid.is_empty() {
        return Err(Error::Argument("PAP grids must be non-empty".into()));
    }
    let amps: Vec<Complex64> = components.iter().map(|c| c.amplitude(frequency_hz)).collect();
    let floor = math::db_pow(noise_floor_db);
    Ok(aod_grid
        .par_iter()
        .map(|&d| {
            let gt: Vec<f64> = components
                .iter()
                .map(|c| 10f64.powf(horn.gain_db(math::wrap_deg(d - c.aod_deg)) / 20.0))
                .collect();
            aoa_grid
                .iter()
                .map(|&a| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (i, c) in components.iter().enumerate() {
                        let gr = 10f64.powf(horn.gain_db(math::wrap_deg(a - c.aoa_deg)) / 20.0);
                        s += amps[i] * (gt[i] * gr);
                    }
                    math::pow_db(s.norm_sqr() + floor)
                })
                .collect()
        })
        .collect())
}

pub fn pap_sweep(scenario: &RoomScenario, aod_grid: &[f64], aoa_grid: &[f64]) -> Result<PapMatrix> {
    let components = trace_components(scenario, scenario.max_order)?;
    let power_db = pap_from_components(
        &components,
        &scenario.horn,
        scenario.frequency_hz,
        scenario.noise_floor_db,
        aod_grid,
        aoa_grid,
    )?;
    Ok(PapMatrix {
        aod_grid: aod_grid.to_vec(),
        aoa_grid: aoa_grid.to_vec(),
        power_db,
        components,
    })
}

impl PapMatrix {
    /// `(aod index, aoa index, power)` of the global maximum.
    pub fn peak(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.power_db.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if p > best.2 {
                    best = (i, j, p);
                }
            }
        }
        best
    }

    /// Grid cell nearest to an angle pair.
    pub fn nearest_cell(&self, aod: f64, aoa: f64) -> (usize, usize) {
        let near = |g: &[f64], x: f64| {
            let mut best = 0;
            for (i, &v) in g.iter().enumerate() {
                if math::wrap_deg(v - x).abs() < math::wrap_deg(g[best] - x).abs() {
                    best = i;
                }
            }
            best
        };
        (near(&self.aod_grid, aod), near(&self.aoa_grid, aoa))
    }

    /// Number of cells within `below_peak_db` of the maximum.
    pub fn cells_above(&self, below_peak_db: f64) -> usize {
        let thr = self.peak().2 - below_peak_db;
        self.power_db.iter().flatten().filter(|&&p| p > thr).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenario_is_valid() {
        RoomScenario::default_room().validate().unwrap();
    }

    #[test]
    fn degenerate_positions_rejected() {
        let mut s = RoomScenario::default_room();
        s.tx.position[0] = 0.0;
        assert!(trace_components(&s, 1).is_err());
        let mut s = RoomScenario::default_room();
        s.rx.position[1] = s.room.length;
        assert!(trace_components(&s, 1).is_err());
    }

    #[test]
    fn horn_half_power() {
        let h = Horn::default();
        assert!((h.gain_db(h.hpbw_deg / 2.0) - (h.gain_dbi - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn periodic_grid_shape() {
        let g = periodic_grid(2.5).unwrap();
        assert_eq!(g.len(), 144);
        assert_eq!(*g.last().unwrap(), 180.0);
        assert!(periodic_grid(0.0).is_err());
    }

    #[test]
    fn crossing_test() {
        assert!(segments_cross([0.0, 0.0], [2.0, 0.0], [1.0, -1.0], [1.0, 1.0]));
        assert!(!segments_cross([0.0, 0.0], [2.0, 0.0], [3.0, -1.0], [3.0, 1.0]));
    }
}
