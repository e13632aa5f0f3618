//! Text formats: phase-profile, measurement, CIR, pattern, sweep and PAP
//! CSVs, plus the `start:stop:step` range syntax. Every CSV starts with a
//! `#` header naming its columns, units and the tool version.

use crate::error::{Error, Result};
use crate::field::RadiationPattern;
use crate::link::{LinkBudgetSweep, Measurement};
use crate::room::PapMatrix;
use crate::sounder::{Cir, Tap};
use crate::synthesis::{check_bits, level_index, PhaseProfile, RisGeometry};
use num_complex::Complex64;
use std::fmt::Write as _;

pub const TOOL: &str = concat!("ris-thz ", env!("CARGO_PKG_VERSION"));

const PROFILE_MAGIC: &str = "# ris-phase v1,";

/// Largest number of points a range may expand to.
pub const MAX_RANGE_POINTS: usize = 10_000_000;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what}: '{}' is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("{what}: non-finite value")));
    }
    Ok(v)
}

/// Serializes a profile: header line, one row of phases per `m`, then an
/// `# amplitude` block when any amplitude differs from 1.
pub fn write_profile_csv(profile: &PhaseProfile) -> String {
    let g = &profile.geometry;
    let bits = profile
        .quantization_bits
        .map_or_else(|| "none".to_string(), |b| b.to_string());
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{PROFILE_MAGIC} {},{},{},{},{}",
        g.rows,
        g.cols,
        num(g.pitch),
        num(g.frequency),
        bits
    );
    let _ = writeln!(s, "# row-major phase_rad, one line per row m; {TOOL}");
    let row = |s: &mut String, v: &[f64]| {
        let line: Vec<String> = v.iter().map(|&x| num(x)).collect();
        let _ = writeln!(s, "{}", line.join(","));
    };
    for m in 0..g.rows {
        row(&mut s, &profile.phase[m * g.cols..(m + 1) * g.cols]);
    }
    if profile.amplitude.iter().any(|&a| a != 1.0) {
        let _ = writeln!(s, "# amplitude");
        for m in 0..g.rows {
            row(&mut s, &profile.amplitude[m * g.cols..(m + 1) * g.cols]);
        }
    }
    s
}

/// Upper bound on cells accepted from a profile file.
const MAX_PROFILE_CELLS: usize = 1 << 24;

pub fn parse_profile_csv(text: &str) -> Result<PhaseProfile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (ln, head) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| Error::parse(1, "empty profile file"))?;
    let rest = head
        .strip_prefix(PROFILE_MAGIC)
        .ok_or_else(|| Error::parse(ln, "missing '# ris-phase v1,' header"))?;
    let f: Vec<&str> = rest.split(',').map(str::trim).collect();
    if f.len() != 5 {
        return Err(Error::parse(ln, "header needs M,N,pitch_m,freq_hz,bits"));
    }
    let count = |s: &str, what| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::parse(ln, format!("{what}: '{s}' is not a count")))
    };
    let rows = count(f[0], "M")?;
    let cols = count(f[1], "N")?;
    if rows.checked_mul(cols).is_none_or(|c| c > MAX_PROFILE_CELLS) {
        return Err(Error::parse(ln, "profile too large"));
    }
    let pitch = parse_f64(f[2], ln, "pitch_m")?;
    let freq = parse_f64(f[3], ln, "freq_hz")?;
    let bits = match f[4] {
        "none" | "" => None,
        b => {
            let v: i64 = b
                .parse()
                .map_err(|_| Error::parse(ln, format!("bits: '{b}' is not an integer")))?;
            Some(check_bits(v).map_err(|e| Error::parse(ln, e.to_string()))?)
        }
    };
    let geometry = RisGeometry::with_pitch(rows, cols, pitch, freq).map_err(|e| Error::parse(ln, e.to_string()))?;

    let mut phase = Vec::with_capacity(rows * cols);
    let mut amplitude = Vec::new();
    let mut in_amp = false;
    let mut last = ln;
    for (ln, l) in lines {
        last = ln;
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            if c.trim() == "amplitude" {
                if phase.len() != rows * cols {
                    return Err(Error::parse(ln, format!("expected {rows} phase rows before amplitude block")));
                }
                if in_amp {
                    return Err(Error::parse(ln, "duplicate amplitude block"));
                }
                in_amp = true;
            }
            continue;
        }
        let target = if in_amp { &mut amplitude } else { &mut phase };
        if target.len() >= rows * cols {
            return Err(Error::parse(ln, format!("more than {rows} rows")));
        }
        let vals: Vec<&str> = l.split(',').collect();
        if vals.len() != cols {
            return Err(Error::parse(ln, format!("expected {cols} values, found {}", vals.len())));
        }
        for v in vals {
            let x = parse_f64(v, ln, if in_amp { "amplitude" } else { "phase" })?;
            if in_amp {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::parse(ln, format!("amplitude {x} outside [0, 1]")));
                }
            } else {
                if !(0.0..crate::math::TWO_PI).contains(&x) {
                    return Err(Error::parse(ln, format!("phase {x} outside [0, 2pi)")));
                }
                if let Some(b) = bits {
                    let step = crate::math::TWO_PI / (1u64 << b) as f64;
                    if level_index(x, b) as f64 * step != x {
                        return Err(Error::parse(ln, format!("phase {x} is not a {b}-bit level")));
                    }
                }
            }
            target.push(x);
        }
    }
    if phase.len() != rows * cols {
        return Err(Error::parse(last, format!("expected {rows} phase rows")));
    }
    if in_amp && amplitude.len() != rows * cols {
        return Err(Error::parse(last, format!("expected {rows} amplitude rows")));
    }
    if !in_amp {
        amplitude = vec![1.0; rows * cols];
    }
    Ok(PhaseProfile {
        geometry,
        phase,
        amplitude,
        quantization_bits: bits,
    })
}

/// Splits a data line into trimmed fields, dropping `#` comments.
fn data_fields(line: &str) -> Option<Vec<&str>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        None
    } else {
        Some(body.split(',').map(str::trim).collect())
    }
}

fn is_header(fields: &[&str], names: &[&str]) -> bool {
    fields.len() == names.len() && fields.iter().zip(names).all(|(a, b)| a == b)
}

/// Measurement CSV `d2_m, gain_db`, `#` comments and an optional header row.
pub fn parse_measurements(text: &str) -> Result<Vec<Measurement>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let Some(f) = data_fields(line) else { continue };
        if out.is_empty() && is_header(&f, &["d2_m", "gain_db"]) {
            continue;
        }
        if f.len() != 2 {
            return Err(Error::parse(ln, format!("expected 2 fields (d2_m, gain_db), found {}", f.len())));
        }
        let d2 = parse_f64(f[0], ln, "d2_m")?;
        if d2 <= 0.0 {
            return Err(Error::parse(ln, format!("d2_m must be > 0, got {d2}")));
        }
        out.push(Measurement {
            d2,
            gain_db: parse_f64(f[1], ln, "gain_db")?,
        });
    }
    Ok(out)
}

pub fn write_measurements(points: &[Measurement]) -> String {
    let mut s = format!("# d2_m [m], gain_db [dB power ratio]; {TOOL}\n");
    for p in points {
        let _ = writeln!(s, "{},{}", num(p.d2), num(p.gain_db));
    }
    s
}

/// CIR CSV `delay_s, re, im`.
pub fn parse_cir_csv(text: &str, resolution_s: f64) -> Result<Cir> {
    let mut taps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let Some(f) = data_fields(line) else { continue };
        if taps.is_empty() && is_header(&f, &["delay_s", "re", "im"]) {
            continue;
        }
        if f.len() != 3 {
            return Err(Error::parse(ln, format!("expected 3 fields (delay_s, re, im), found {}", f.len())));
        }
        let delay_s = parse_f64(f[0], ln, "delay_s")?;
        if delay_s < 0.0 {
            return Err(Error::parse(ln, "delay_s must be >= 0"));
        }
        taps.push(Tap {
            delay_s,
            amplitude: Complex64::new(parse_f64(f[1], ln, "re")?, parse_f64(f[2], ln, "im")?),
        });
    }
    Cir::new(taps, resolution_s)
}

pub fn write_cir_csv(cir: &Cir) -> String {
    let mut s = format!("# delay_s [s], re, im [linear amplitude]; {TOOL}\n");
    for t in &cir.taps {
        let _ = writeln!(s, "{},{},{}", num(t.delay_s), num(t.amplitude.re), num(t.amplitude.im));
    }
    s
}

/// Pattern CSV `theta_deg, re, im, power_db`.
pub fn write_pattern_csv(p: &RadiationPattern) -> String {
    let unit = match p.normalization {
        crate::field::Normalization::Absolute => "dBsm",
        crate::field::Normalization::PeakNormalized => "dB re peak",
    };
    let mut s = format!("# theta_deg [deg], re, im [field], power_db [{unit}]; {TOOL}\n");
    for ((t, v), pdb) in p.angles().iter().zip(&p.values).zip(&p.power_db) {
        let _ = writeln!(s, "{},{},{},{}", num(*t), num(v.re), num(v.im), num(*pdb));
    }
    s
}

/// Link sweep CSV; empty fields where no measurement exists.
pub fn write_link_csv(sweep: &LinkBudgetSweep) -> String {
    let mut s = format!(
        "# d2_m [m], p_ff_db, p_nfff_db, measured_corrected_db, residual_db [dB power ratio]; sigma {} dBsm, correction {} dB; {TOOL}\n",
        sweep.sigma_dbsm, sweep.correction_db
    );
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for p in &sweep.points {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            num(p.d2),
            num(p.p_ff_db),
            num(p.p_nfff_db),
            opt(p.measured_corrected_db),
            opt(p.residual_db)
        );
    }
    s
}

/// K sweep CSV `d_m, k_sq_db`.
pub fn write_k_csv(points: &[(f64, f64)]) -> String {
    let mut s = format!("# d_m [m], k_sq_db [dB power ratio]; {TOOL}\n");
    for (d, k) in points {
        let _ = writeln!(s, "{},{}", num(*d), num(*k));
    }
    s
}

/// PAP CSV `aod_deg, aoa_deg, power_db`, AoD-major.
pub fn write_pap_csv(p: &PapMatrix) -> String {
    let mut s = format!("# aod_deg [deg], aoa_deg [deg], power_db [dB power ratio incl. antenna gains]; {TOOL}\n");
    for (i, &d) in p.aod_grid.iter().enumerate() {
        for (j, &a) in p.aoa_grid.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", num(d), num(a), num(p.power_db[i][j]));
        }
    }
    s
}

/// Parses `start:stop:step` (inclusive of `stop` when on the grid) or a single value.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let f: Vec<&str> = spec.split(':').collect();
    let v = |i: usize, what| parse_f64(f[i], 1, what);
    match f.len() {
        1 => Ok(vec![v(0, "value")?]),
        3 => {
            let (a, b, h) = (v(0, "start")?, v(1, "stop")?, v(2, "step")?);
            if h <= 0.0 {
                return Err(Error::parse(1, format!("step must be > 0, got {h}")));
            }
            if b < a {
                return Err(Error::parse(1, format!("stop {b} is below start {a}")));
            }
            let n = ((b - a) / h + 1e-9).floor();
            if !(n < MAX_RANGE_POINTS as f64) {
                return Err(Error::parse(1, "range expands to too many points"));
            }
            Ok((0..=n as usize).map(|i| a + i as f64 * h).collect())
        }
        _ => Err(Error::parse(1, format!("range '{spec}' must be start:stop:step or a single value"))),
    }
}
