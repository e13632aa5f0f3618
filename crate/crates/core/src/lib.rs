//! Simulation toolkit for reconfigurable intelligent surfaces at 304 GHz:
//! quantized phase-profile synthesis, physical-optics scattering and RCS,
//! near-field boundary metrics, Tx–RIS–Rx path-gain models, an image-method
//! room simulator and a correlative channel-sounder chain.

pub mod error;
pub mod field;
pub mod formats;
pub mod link;
pub mod math;
pub mod nearfield;
pub mod presets;
pub mod room;
pub mod sounder;
pub mod synthesis;

pub use error::{Error, Result};
pub use field::{
    compute_pattern, compute_rcs, pattern_metrics, FieldMode, ObservationSpec, PatternMetrics, RadiationPattern,
    RcsReport,
};
pub use link::{path_gain_ff, path_gain_nfff, sweep_and_compare, LinkBudgetSweep, LinkGeometry};
pub use nearfield::{boundaries, k_factor, ApertureSpec, BoundaryReport};
pub use presets::RisSurface;
pub use room::{pap_sweep, trace_components, PapMatrix, PathComponent, RoomScenario};
pub use sounder::{generate_mls, sound_channel, Cir, SounderConfig};
pub use synthesis::{
    quantization_loss_theoretical, quantize_phase, synthesize_gradient_phase, Direction, PhaseProfile,
    ReflectionSpec, RisGeometry,
};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "RIS_THZ_THREADS";

/// Sizes the global thread pool from `RIS_THZ_THREADS` when set. Returns the
/// configured count; later calls and unset or invalid values leave the pool alone.
pub fn init_threads_from_env() -> Option<usize> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
    if n == 0 {
        return None;
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok()?;
    Some(n)
}
