use clap::{Args, Parser, Subcommand, ValueEnum};
use ris_core::presets::RisSurface;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "ris-thz", version, about = "RIS design, scattering, link-budget, room and sounder simulation at 304 GHz")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a (quantized) phase-gradient profile and write it as CSV.
    Synthesize(SynthesizeArgs),
    /// Scattering pattern over a θ cut, near or far field.
    Pattern(PatternArgs),
    /// Far-field RCS and aperture efficiency as JSON.
    Rcs(RcsArgs),
    /// Fresnel, Rayleigh and depth-of-focus distances as JSON.
    Boundaries(BoundariesArgs),
    /// Far-field beamforming error K² versus distance.
    KSweep(KSweepArgs),
    /// Path gain of the two link models over a d2 sweep.
    Linkbudget(LinkArgs),
    /// Power angular profile of the room scenario.
    Pap(PapArgs),
    /// Round trip of a CIR through the correlative sounder.
    SounderSim(SounderArgs),
    /// End-to-end reproduction of a reference table or figure.
    Reproduce(ReproduceArgs),
}

/// Where the phase profile comes from.
#[derive(Debug, Args)]
pub struct ProfileSource {
    /// Phase-profile CSV; overrides --bits and --surface.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Quantization bits of the built-in 100×100 device.
    #[arg(long, conflicts_with = "surface")]
    pub bits: Option<u32>,
    /// Built-in device surface: continuous, pec or <b>bit.
    #[arg(long, default_value = "3bit")]
    pub surface: RisSurface,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long, default_value_t = 100)]
    pub rows: usize,
    #[arg(long, default_value_t = 100)]
    pub cols: usize,
    /// Cell pitch in meters [default: half a wavelength].
    #[arg(long)]
    pub pitch: Option<f64>,
    /// Frequency in Hz.
    #[arg(long, default_value_t = 304.2e9)]
    pub freq: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_in: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi_in: f64,
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub theta_out: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi_out: f64,
    /// Quantize to this many bits (1..=16).
    #[arg(long)]
    pub bits: Option<i64>,
    /// Uniform cell amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Observation distance in meters; far field when omitted.
    #[arg(long)]
    pub near: Option<f64>,
    /// θ range in degrees, start:stop:step.
    #[arg(long, default_value = "-90:90:0.05", allow_hyphen_values = true)]
    pub angles: String,
    /// Scan-plane azimuth in degrees.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub cut: f64,
    /// Incident polar angle in degrees.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_in: f64,
    /// Element-factor exponent q of cos^q.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Spherical source at this distance instead of a plane wave.
    #[arg(long)]
    pub source_distance: Option<f64>,
    /// Normalize to a 0 dB peak.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RcsArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Comma-separated θ list or start:stop:step, degrees.
    #[arg(long, default_value = "30,-30,0", allow_hyphen_values = true)]
    pub directions: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_in: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundariesArgs {
    /// Aperture side length in meters.
    #[arg(long, default_value_t = 0.05)]
    pub side: f64,
    #[arg(long, default_value_t = 304.2e9)]
    pub freq: f64,
    /// Beam tilt in degrees.
    #[arg(long, default_value_t = 0.0)]
    pub tilt: f64,
    /// Effective-aperture area ratio.
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,
    /// Use the side (not the diagonal) for the Rayleigh distance.
    #[arg(long)]
    pub rayleigh_side: bool,
    /// Use the diagonal (not the side) for the Fresnel distance.
    #[arg(long)]
    pub fresnel_diagonal: bool,
    /// Use the side (not the diagonal) for depth-of-focus distances.
    #[arg(long)]
    pub df_side: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KSweepArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Distances in meters, start:stop:step.
    #[arg(long, default_value = "0.2:10:0.05")]
    pub d: String,
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub angle: f64,
    /// Evaluate on the central sub-aperture of this area ratio.
    #[arg(long)]
    pub efficiency: Option<f64>,
    /// Closed-form Fresnel approximation for a uniform square aperture.
    #[arg(long)]
    pub approximate: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApertureChoice {
    Physical,
    Effective,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Tx–RIS distance in meters.
    #[arg(long, default_value_t = 2.15)]
    pub d1: f64,
    /// Rx angle from the RIS normal in degrees.
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub angle: f64,
    /// RIS–Rx distances, start:stop:step.
    #[arg(long, default_value = "0.2:10:0.05")]
    pub d2: String,
    /// RCS in dBsm [default: reference value for the surface].
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Compute the RCS from the profile instead of using the reference value.
    #[arg(long, conflicts_with = "sigma")]
    pub live_sigma: bool,
    /// Measured path gains, CSV `d2_m, gain_db`.
    #[arg(long)]
    pub measured: Option<PathBuf>,
    /// Constant added to measured gains, dB.
    #[arg(long, default_value_t = 5.5, allow_hyphen_values = true)]
    pub correction: f64,
    /// Aperture used for K.
    #[arg(long, value_enum, default_value_t = ApertureChoice::Effective)]
    pub aperture: ApertureChoice,
    /// Effective-aperture ratio [default: reference efficiency for the surface].
    #[arg(long)]
    pub efficiency: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PapArgs {
    /// Scenario JSON [default: built-in default room].
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Surface placed in the scenario: continuous, pec or <b>bit.
    #[arg(long)]
    pub ris: Option<RisSurface>,
    /// Grid step in degrees for both axes.
    #[arg(long, default_value_t = 2.5)]
    pub step: f64,
    /// Highest wall-reflection order.
    #[arg(long)]
    pub max_order: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SounderArgs {
    /// Input CIR, CSV `delay_s, re, im`.
    #[arg(long)]
    pub cir: PathBuf,
    /// Noise power per sample, dB re a unit tap; noiseless when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub noise_db: Option<f64>,
    /// Peak threshold above the median correlation floor, dB.
    #[arg(long, default_value_t = 13.0)]
    pub threshold_db: f64,
    /// Noise generator seed.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Fig2,
    Fig4,
    Fig5,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Output directory, created if missing.
    #[arg(long, default_value = "reproduce-out")]
    pub out_dir: PathBuf,
}
