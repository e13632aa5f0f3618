//! Correlative channel-sounder emulation: maximal-length sequences, periodic
//! transmission through a tapped-delay channel, circular correlation and
//! peak picking. The simulation is baseband at one sample per chip.

use crate::error::{Error, Result};
use crate::math::{self, SPEED_OF_LIGHT};
use crate::room::PathComponent;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SounderConfig {
    pub sequence_length: usize,
    pub chip_duration_s: f64,
    pub bandwidth_hz: f64,
    /// Oversampling of the hardware sampler; recorded, the simulation uses one sample per chip.
    pub sampling_factor: u32,
    pub center_frequency_hz: f64,
    /// Peak-picking threshold above the median correlation power.
    pub threshold_db: f64,
    /// Initial LFSR register.
    pub lfsr_seed: u32,
    /// Seed of the noise generator.
    pub noise_seed: u64,
}

/// Chip clock of the 304 GHz sounder.
pub const CLOCK_HZ: f64 = 9.22e9;

impl Default for SounderConfig {
    fn default() -> Self {
        SounderConfig {
            sequence_length: 4095,
            chip_duration_s: 1.0 / CLOCK_HZ,
            bandwidth_hz: 8e9,
            sampling_factor: 128,
            center_frequency_hz: 304.2e9,
            threshold_db: 13.0,
            lfsr_seed: 1,
            noise_seed: 0x5eed,
        }
    }
}

impl SounderConfig {
    pub fn sequence_duration_s(&self) -> f64 {
        self.sequence_length as f64 * self.chip_duration_s
    }

    pub fn validate(&self) -> Result<()> {
        mls_order(self.sequence_length)?;
        if !(self.chip_duration_s > 0.0 && self.chip_duration_s.is_finite()) {
            return Err(Error::Sounder("chip duration must be > 0".into()));
        }
        if self.sampling_factor == 0 {
            return Err(Error::Sounder("sampling factor must be >= 1".into()));
        }
        if !self.threshold_db.is_finite() {
            return Err(Error::Sounder("threshold must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay_s: f64,
    pub amplitude: Complex64,
}

/// Channel impulse response with strictly increasing, non-negative delays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cir {
    pub taps: Vec<Tap>,
    pub resolution_s: f64,
}

impl Cir {
    /// Sorts taps by delay and checks the invariants.
    pub fn new(mut taps: Vec<Tap>, resolution_s: f64) -> Result<Self> {
        if !(resolution_s > 0.0) {
            return Err(Error::Sounder("resolution must be > 0".into()));
        }
        if let Some(t) = taps
            .iter()
            .find(|t| !(t.delay_s >= 0.0 && t.delay_s.is_finite()) || !t.amplitude.is_finite())
        {
            return Err(Error::Sounder(format!("invalid tap at delay {}", t.delay_s)));
        }
        taps.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
        if taps.windows(2).any(|w| w[1].delay_s <= w[0].delay_s) {
            return Err(Error::Sounder("tap delays must be distinct".into()));
        }
        Ok(Cir { taps, resolution_s })
    }

    /// Multipath components as taps, with the carrier phase `e^{−j2πf_cτ}`
    /// of each delay; taps falling in one resolution bin are summed.
    pub fn from_components(components: &[PathComponent], config: &SounderConfig) -> Result<Self> {
        let tc = config.chip_duration_s;
        let mut bins: Vec<(i64, Complex64)> = Vec::new();
        for c in components {
            let bin = (c.delay_s / tc + 0.5).floor() as i64;
            let a = c.amplitude(config.center_frequency_hz);
            match bins.iter_mut().find(|(b, _)| *b == bin) {
                Some((_, s)) => *s += a,
                None => bins.push((bin, a)),
            }
        }
        let taps = bins
            .into_iter()
            .map(|(b, a)| Tap {
                delay_s: b as f64 * tc,
                amplitude: a,
            })
            .collect();
        Cir::new(taps, tc)
    }

    /// Delay shifted by `chips` whole chips.
    pub fn delayed(&self, chips: usize, chip_s: f64) -> Result<Self> {
        let taps = self
            .taps
            .iter()
            .map(|t| Tap {
                delay_s: t.delay_s + chips as f64 * chip_s,
                amplitude: t.amplitude,
            })
            .collect();
        Cir::new(taps, self.resolution_s)
    }

    /// Path lengths of the taps in meters.
    pub fn ranges_m(&self) -> Vec<f64> {
        self.taps.iter().map(|t| t.delay_s * SPEED_OF_LIGHT).collect()
    }
}

/// Fibonacci LFSR feedback taps (polynomial exponents) giving maximal period.
pub fn mls_taps(order: u32) -> Option<&'static [u32]> {
    Some(match order {
        2 => &[2, 1],
        3 => &[3, 2],
        4 => &[4, 3],
        5 => &[5, 3],
        6 => &[6, 5],
        7 => &[7, 6],
        8 => &[8, 6, 5, 4],
        9 => &[9, 5],
        10 => &[10, 7],
        11 => &[11, 9],
        12 => &[12, 11, 10, 4],
        13 => &[13, 12, 11, 8],
        14 => &[14, 13, 12, 2],
        15 => &[15, 14],
        16 => &[16, 15, 13, 4],
        _ => return None,
    })
}

fn mls_order(length: usize) -> Result<u32> {
    let n = length + 1;
    if !n.is_power_of_two() {
        return Err(Error::Sounder(format!("sequence length {length} is not 2^k - 1")));
    }
    let k = n.trailing_zeros();
    if !(2..=16).contains(&k) {
        return Err(Error::Sounder(format!("sequence order {k} outside 2..=16")));
    }
    Ok(k)
}

/// Bipolar maximal-length sequence (bit 0 → +1, bit 1 → −1).
pub fn generate_mls(length: usize, seed: u32) -> Result<Vec<f64>> {
    let k = mls_order(length)?;
    let mask = (1u32 << k) - 1;
    if seed & mask == 0 || seed > mask {
        return Err(Error::Sounder(format!("seed must be in 1..={mask}, got {seed}")));
    }
    let taps = mls_taps(k).expect("tap table covers 2..=16");
    let mut state = seed;
    let mut out = Vec::with_capacity(length);
    for _ in 0..length {
        let bit = state & 1;
        out.push(if bit == 0 { 1.0 } else { -1.0 });
        let fb = taps.iter().fold(0, |acc, &t| acc ^ (state >> (k - t)) & 1);
        state = (state >> 1) | (fb << (k - 1));
    }
    Ok(out)
}

/// Periodic autocorrelation of a real sequence for every lag.
pub fn periodic_autocorrelation(seq: &[f64]) -> Vec<f64> {
    let n = seq.len();
    (0..n)
        .map(|lag| (0..n).map(|i| seq[i] * seq[(i + lag) % n]).sum())
        .collect()
}

fn chip_shift(delay_s: f64, chip_s: f64) -> usize {
    (delay_s / chip_s + 0.5).floor() as usize
}

/// One period of the received baseband signal in steady state, with
/// complex AWGN of power `noise_db` (dB re a unit-amplitude chip) per sample.
pub fn received_signal(cir: &Cir, config: &SounderConfig, noise_db: Option<f64>) -> Result<Vec<Complex64>> {
    config.validate()?;
    let dur = config.sequence_duration_s();
    if let Some(t) = cir.taps.iter().find(|t| t.delay_s >= dur) {
        return Err(Error::Sounder(format!(
            "tap delay {} s aliases: must be below the sequence duration {} s",
            t.delay_s, dur
        )));
    }
    let s = generate_mls(config.sequence_length, config.lfsr_seed)?;
    let n = s.len();
    let mut r = vec![Complex64::new(0.0, 0.0); n];
    for t in &cir.taps {
        let m = chip_shift(t.delay_s, config.chip_duration_s) % n;
        for (i, v) in r.iter_mut().enumerate() {
            *v += t.amplitude * s[(i + n - m) % n];
        }
    }
    if let Some(db) = noise_db {
        if !db.is_finite() {
            return Err(Error::Sounder("noise level must be finite".into()));
        }
        let sd = (math::db_pow(db) / 2.0).sqrt();
        let normal = Normal::new(0.0, sd).map_err(|e| Error::Sounder(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.noise_seed);
        for v in r.iter_mut() {
            *v += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    Ok(r)
}

/// Circular cross-correlation with the reference sequence, divided by its length.
pub fn correlate(rx: &[Complex64], seq: &[f64]) -> Vec<Complex64> {
    let n = rx.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut a = rx.to_vec();
    let mut b: Vec<Complex64> = seq.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    inv.process(&mut a);
    let scale = 1.0 / (n as f64 * n as f64);
    a.iter().map(|z| z * scale).collect()
}

/// Local maxima of `|R|²` exceeding the median by `threshold_db`.
pub fn pick_peaks(corr: &[Complex64], chip_s: f64, threshold_db: f64) -> Result<Cir> {
    let n = corr.len();
    let p: Vec<f64> = corr.iter().map(|z| z.norm_sqr()).collect();
    let mut sorted = p.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n == 0 { 0.0 } else { sorted[n / 2] };
    let thr = median * math::db_pow(threshold_db);
    let taps = (0..n)
        .filter(|&i| {
            let prev = p[(i + n - 1) % n];
            let next = p[(i + 1) % n];
            p[i] > thr && p[i] > prev && p[i] >= next
        })
        .map(|i| Tap {
            delay_s: i as f64 * chip_s,
            amplitude: corr[i],
        })
        .collect();
    Cir::new(taps, chip_s)
}

/// Transmits the MLS through `cir_true`, correlates and extracts taps.
pub fn sound_channel(cir_true: &Cir, config: &SounderConfig, noise_db: Option<f64>) -> Result<Cir> {
    let rx = received_signal(cir_true, config, noise_db)?;
    let s = generate_mls(config.sequence_length, config.lfsr_seed)?;
    let corr = correlate(&rx, &s);
    pick_peaks(&corr, config.chip_duration_s, config.threshold_db)
}

/// Correlation that a tap of unit amplitude leaves at every other lag.
pub fn sidelobe_level(length: usize) -> f64 {
    -1.0 / length as f64
}
