use crate::args::*;
use crate::manifest::{read_input, read_text, to_json, write_output, RunManifest};
use crate::{reproduce, Outcome};
use anyhow::{bail, Context, Result};
use ris_core::field::{self, FieldMode, ObservationSpec};
use ris_core::formats;
use ris_core::link::{self, LinkGeometry, NfffOptions};
use ris_core::math;
use ris_core::nearfield::{self, ApertureSpec, DiagonalConvention, KOptions};
use ris_core::presets::{self, RisSurface};
use ris_core::room::{self, RoomScenario};
use ris_core::sounder::{self, SounderConfig};
use ris_core::synthesis::{self, Direction, PhaseProfile, ReflectionSpec, RisGeometry};
use serde_json::json;
use std::path::PathBuf;

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Synthesize(a) => synthesize(a),
        Command::Pattern(a) => pattern(a),
        Command::Rcs(a) => rcs(a),
        Command::Boundaries(a) => boundaries(a),
        Command::KSweep(a) => k_sweep(a),
        Command::Linkbudget(a) => linkbudget(a),
        Command::Pap(a) => pap(a),
        Command::SounderSim(a) => sounder_sim(a),
        Command::Reproduce(a) => reproduce::run(a),
    }
    .map(|o| o.unwrap_or(Outcome::Ok))
}

type Inputs = Vec<(PathBuf, Vec<u8>)>;

/// Loads the profile and describes its origin for the manifest.
fn load_profile(src: &ProfileSource, inputs: &mut Inputs) -> Result<(PhaseProfile, RisSurface, String)> {
    if let Some(path) = &src.profile {
        let input = read_input(path)?;
        let p = formats::parse_profile_csv(read_text(&input)?)
            .with_context(|| format!("invalid profile {}", path.display()))?;
        inputs.push(input);
        let surface = p.quantization_bits.map_or(RisSurface::Continuous, RisSurface::Quantized);
        return Ok((p, surface, format!("file:{}", path.display())));
    }
    let surface = match src.bits {
        Some(b) => {
            synthesis::quantize_phase(&PhaseProfile::uniform(presets::geometry(), 0.0), b as i64)?;
            RisSurface::Quantized(b)
        }
        None => src.surface,
    };
    Ok((presets::profile(surface), surface, format!("preset:{surface}")))
}

fn synthesize(a: SynthesizeArgs) -> Result<Option<Outcome>> {
    let g = match a.pitch {
        Some(p) => RisGeometry::with_pitch(a.rows, a.cols, p, a.freq)?,
        None => RisGeometry::new(a.rows, a.cols, a.freq)?,
    };
    g.validate()?;
    let spec = ReflectionSpec {
        incident: Direction::new(a.theta_in, a.phi_in),
        outgoing: Direction::new(a.theta_out, a.phi_out),
    };
    let mut p = synthesis::synthesize_gradient_phase(&g, &spec)?;
    if let Some(b) = a.bits {
        p = synthesis::quantize_phase(&p, b)?;
    }
    let p = p.with_uniform_amplitude(a.amplitude)?;
    let params = json!({
        "rows": a.rows, "cols": a.cols, "pitch_m": g.pitch, "freq_hz": a.freq,
        "incident": spec.incident, "outgoing": spec.outgoing, "bits": a.bits, "amplitude": a.amplitude,
    });
    let m = RunManifest::new("synthesize", params, &[]);
    write_output(&a.out, &formats::write_profile_csv(&p), &m)?;
    Ok(None)
}

fn pattern(a: PatternArgs) -> Result<Option<Outcome>> {
    let mut inputs = Vec::new();
    let (p, _, origin) = load_profile(&a.source, &mut inputs)?;
    let angles = formats::parse_range(&a.angles).context("--angles")?;
    let obs = ObservationSpec {
        mode: match a.near {
            Some(distance) => FieldMode::NearField { distance },
            None => FieldMode::FarField,
        },
        cut_deg: a.cut,
        angles,
        incident: Direction::in_cut(a.theta_in, a.cut),
        element_q: a.q,
        source_distance: a.source_distance,
    };
    let mut pat = field::compute_pattern(&p, &obs)?;
    if a.normalize {
        pat = pat.peak_normalized();
    }
    let metrics = field::pattern_metrics(&pat).ok();
    let params = json!({
        "profile": origin, "mode": obs.mode, "cut_deg": a.cut, "angles": a.angles,
        "theta_in_deg": a.theta_in, "element_q": a.q, "source_distance_m": a.source_distance,
        "normalize": a.normalize,
    });
    let m = RunManifest::new("pattern", params, &inputs);
    write_output(&a.out, &formats::write_pattern_csv(&pat), &m)?;
    if let Some(mt) = metrics {
        if mt.grid_too_coarse {
            eprintln!("warning: angular step exceeds HPBW/4; metrics are unreliable");
        }
        println!("{}", serde_json::to_string(&mt)?);
    }
    Ok(None)
}

fn parse_directions(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        return Ok(formats::parse_range(s)?);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid direction '{t}'"))
        })
        .collect()
}

fn emit_json(out: &Option<PathBuf>, text: &str, m: &RunManifest) -> Result<()> {
    match out {
        Some(path) => write_output(path, text, m),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rcs(a: RcsArgs) -> Result<Option<Outcome>> {
    let mut inputs = Vec::new();
    let (p, _, origin) = load_profile(&a.source, &mut inputs)?;
    let dirs = parse_directions(&a.directions)?;
    let rep = field::compute_rcs_with(&p, &dirs, Direction::new(a.theta_in, 0.0), 0.0, a.q)?;
    let params = json!({"profile": origin, "directions_deg": dirs, "theta_in_deg": a.theta_in, "element_q": a.q});
    emit_json(&a.out, &to_json(&rep)?, &RunManifest::new("rcs", params, &inputs))?;
    Ok(None)
}

fn boundaries(a: BoundariesArgs) -> Result<Option<Outcome>> {
    let ap = ApertureSpec {
        side_length: a.side,
        wavelength: math::wavelength(a.freq),
        efficiency: a.efficiency,
        diagonal_convention: DiagonalConvention {
            rayleigh: !a.rayleigh_side,
            fresnel: a.fresnel_diagonal,
            depth_of_focus: !a.df_side,
        },
    };
    if !(a.freq > 0.0) {
        bail!("frequency must be > 0");
    }
    let rep = nearfield::boundaries(&ap, a.tilt)?;
    let params = json!({"aperture": ap, "tilt_deg": a.tilt, "freq_hz": a.freq});
    emit_json(&a.out, &to_json(&rep)?, &RunManifest::new("boundaries", params, &[]))?;
    Ok(None)
}

fn k_sweep(a: KSweepArgs) -> Result<Option<Outcome>> {
    let mut inputs = Vec::new();
    let (p, _, origin) = load_profile(&a.source, &mut inputs)?;
    let d = formats::parse_range(&a.d).context("--d")?;
    let pts = if a.approximate {
        let eff = a.efficiency.unwrap_or(1.0);
        let side = p.geometry.side_length() * eff.sqrt();
        d.iter()
            .map(|&x| {
                nearfield::k_squared_approximate(side, p.geometry.wavelength(), x, a.angle)
                    .map(|k2| (x, math::pow_db(k2)))
            })
            .collect::<ris_core::Result<Vec<_>>>()?
    } else {
        let prof = match a.efficiency {
            Some(e) => p.effective_aperture(e)?,
            None => p,
        };
        nearfield::k_sweep(&prof, &d, a.angle, &KOptions::default())?
    };
    let params = json!({
        "profile": origin, "d_m": a.d, "angle_deg": a.angle, "efficiency": a.efficiency,
        "approximate": a.approximate,
    });
    write_output(&a.out, &formats::write_k_csv(&pts), &RunManifest::new("k-sweep", params, &inputs))?;
    Ok(None)
}

fn linkbudget(a: LinkArgs) -> Result<Option<Outcome>> {
    let mut inputs = Vec::new();
    let (p, surface, origin) = load_profile(&a.source, &mut inputs)?;
    let bits = surface.bits();
    let sigma = match (a.sigma, a.live_sigma) {
        (Some(s), _) => s,
        (None, true) => field::compute_rcs(&p, &[a.angle], Direction::NORMAL)?
            .at(a.angle)
            .expect("requested direction present"),
        (None, false) => match bits.and_then(presets::reference_rcs_dbsm) {
            Some(s) => s,
            None => bail!("no reference RCS for surface {surface}; pass --sigma or --live-sigma"),
        },
    };
    let opts = match a.aperture {
        ApertureChoice::Physical => NfffOptions::default(),
        ApertureChoice::Effective => {
            let eff = match a.efficiency.or_else(|| bits.and_then(presets::reference_efficiency)) {
                Some(e) => e,
                None => bail!("no reference efficiency for surface {surface}; pass --efficiency"),
            };
            NfffOptions::effective(eff)
        }
    };
    let measured = match &a.measured {
        Some(path) => {
            let input = read_input(path)?;
            let m = formats::parse_measurements(read_text(&input)?)
                .with_context(|| format!("invalid measurement file {}", path.display()))?;
            inputs.push(input);
            Some(m)
        }
        None => None,
    };
    let d2 = formats::parse_range(&a.d2).context("--d2")?;
    let template = LinkGeometry {
        d1: a.d1,
        d2: 1.0,
        rx_angle_deg: a.angle,
        wavelength: p.geometry.wavelength(),
    };
    let sweep = link::sweep_and_compare(&template, &d2, sigma, &p, measured.as_deref(), a.correction, &opts)?;
    let params = json!({
        "profile": origin, "d1_m": a.d1, "angle_deg": a.angle, "d2_m": a.d2, "sigma_dbsm": sigma,
        "correction_db": a.correction, "k": opts,
    });
    write_output(&a.out, &formats::write_link_csv(&sweep), &RunManifest::new("linkbudget", params, &inputs))?;
    Ok(None)
}

fn pap(a: PapArgs) -> Result<Option<Outcome>> {
    let mut inputs = Vec::new();
    let mut sc = match &a.scenario {
        Some(path) => {
            let input = read_input(path)?;
            let sc = RoomScenario::from_json(read_text(&input)?)
                .with_context(|| format!("invalid scenario {}", path.display()))?;
            inputs.push(input);
            sc
        }
        None => RoomScenario::default_room(),
    };
    if let Some(s) = a.ris {
        sc.ris.surface = s;
    }
    if let Some(o) = a.max_order {
        sc.max_order = o;
    }
    let grid = room::periodic_grid(a.step)?;
    let m = room::pap_sweep(&sc, &grid, &grid)?;
    let params = json!({"scenario": sc, "step_deg": a.step});
    let manifest = RunManifest::new("pap", params, &inputs);
    write_output(&a.out, &formats::write_pap_csv(&m), &manifest)?;
    let comp_path = components_path(&a.out);
    write_output(&comp_path, &to_json(&m.components)?, &manifest)?;
    Ok(None)
}

pub fn components_path(out: &std::path::Path) -> PathBuf {
    out.with_extension("components.json")
}

fn sounder_sim(a: SounderArgs) -> Result<Option<Outcome>> {
    let cfg = SounderConfig {
        threshold_db: a.threshold_db,
        noise_seed: a.seed,
        ..SounderConfig::default()
    };
    let input = read_input(&a.cir)?;
    let cir = formats::parse_cir_csv(read_text(&input)?, cfg.chip_duration_s)
        .with_context(|| format!("invalid CIR {}", a.cir.display()))?;
    let got = sounder::sound_channel(&cir, &cfg, a.noise_db)?;
    let params = json!({"config": cfg, "noise_db": a.noise_db});
    let m = RunManifest::new("sounder-sim", params, &[input]);
    write_output(&a.out, &formats::write_cir_csv(&got), &m)?;
    Ok(None)
}
