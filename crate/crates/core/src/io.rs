//! File formats: two-column signal text, the CWTF binary grid dump, CSV
//! tables and JSON fit reports.
//!
//! CWTF layout (little-endian): magic `CWTF`, u32 version = 1, u64 n_scales,
//! u64 n_translations, f64 b0, f64 db, then n_scales f64 scale values, then
//! the row-major complex matrix as interleaved (re, im) f64 pairs.

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::cwt::{CwtField, ScaleGrid};
use crate::error::{Error, Result};
use crate::model::{RrdfInput, RrdfMode};
use crate::signal::SignalSeries;

const CWTF_MAGIC: &[u8; 4] = b"CWTF";
const CWTF_VERSION: u32 = 1;

/// Formats a float with 17 significant decimal digits, enough to round-trip
/// any f64 bit pattern.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Grid data as stored in a CWTF file; the mother wavelet is not part of
/// the format and must be re-supplied to rebuild a [`CwtField`].
#[derive(Debug, Clone)]
pub struct GridData {
    pub scales: Vec<f64>,
    pub b0: f64,
    pub db: f64,
    pub values: Array2<Complex64>,
}

impl GridData {
    pub fn from_field(field: &CwtField) -> Self {
        GridData {
            scales: field.grid().scales().to_vec(),
            b0: field.b0(),
            db: field.db(),
            values: field.values().clone(),
        }
    }

    pub fn into_field(self, wavelet: crate::wavelet::MotherWavelet) -> Result<CwtField> {
        CwtField::from_parts(ScaleGrid::new(self.scales)?, self.b0, self.db, self.values, wavelet)
    }
}

/// Writes a CWTF binary grid.
pub fn write_cwtf<W: Write>(mut out: W, field: &CwtField) -> Result<()> {
    out.write_all(CWTF_MAGIC)?;
    out.write_all(&CWTF_VERSION.to_le_bytes())?;
    out.write_all(&(field.n_scales() as u64).to_le_bytes())?;
    out.write_all(&(field.n_translations() as u64).to_le_bytes())?;
    out.write_all(&field.b0().to_le_bytes())?;
    out.write_all(&field.db().to_le_bytes())?;
    for &a in field.grid().scales() {
        out.write_all(&a.to_le_bytes())?;
    }
    for i in 0..field.n_scales() {
        for j in 0..field.n_translations() {
            let v = field.value(i, j);
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a CWTF binary grid.
pub fn read_cwtf<R: Read>(mut input: R) -> Result<GridData> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != CWTF_MAGIC {
        return Err(Error::BadFormat(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut input)?;
    if version != CWTF_VERSION {
        return Err(Error::BadFormat(format!("unsupported version {version}")));
    }
    let n_scales = read_u64(&mut input)? as usize;
    let n_trans = read_u64(&mut input)? as usize;
    if n_scales == 0 || n_trans == 0 {
        return Err(Error::BadFormat("empty grid".into()));
    }
    if n_scales.saturating_mul(n_trans) > (1usize << 31) {
        return Err(Error::BadFormat(format!("implausible grid size {n_scales}x{n_trans}")));
    }
    let b0 = read_f64(&mut input)?;
    let db = read_f64(&mut input)?;
    let mut scales = Vec::with_capacity(n_scales);
    for _ in 0..n_scales {
        scales.push(read_f64(&mut input)?);
    }
    let mut values = Array2::default((n_scales, n_trans));
    for i in 0..n_scales {
        for j in 0..n_trans {
            let re = read_f64(&mut input)?;
            let im = read_f64(&mut input)?;
            values[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(GridData { scales, b0, db, values })
}

fn split_columns(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Reads a two-column (axis, value) text signal. Blank lines and `#`
/// comments are skipped; parse failures report the 1-based line number.
pub fn read_signal_text<R: Read>(mut input: R) -> Result<SignalSeries> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (axis, values) = parse_two_columns(&text)?;
    series_from_columns(&axis, values)
}

fn parse_two_columns(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut axis = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols = split_columns(line);
        if cols.len() < 2 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected two columns, got {}", cols.len()),
            });
        }
        let x: f64 = cols[0].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad number {:?}", cols[0]),
        })?;
        let v: f64 = cols[1].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("bad number {:?}", cols[1]),
        })?;
        axis.push(x);
        values.push(v);
    }
    Ok((axis, values))
}

fn series_from_columns(axis: &[f64], values: Vec<f64>) -> Result<SignalSeries> {
    if axis.len() < 2 {
        return Err(Error::Contract("signal file needs at least two samples".into()));
    }
    let dt = axis[1] - axis[0];
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Contract("signal axis must be increasing".into()));
    }
    for (i, pair) in axis.windows(2).enumerate() {
        if ((pair[1] - pair[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::Contract(format!(
                "non-uniform axis near sample {i}: step {} vs {}",
                pair[1] - pair[0],
                dt
            )));
        }
    }
    SignalSeries::new(axis[0], dt, values)
}

/// Writes a two-column signal file.
pub fn write_signal_text<W: Write>(mut out: W, signal: &SignalSeries) -> Result<()> {
    writeln!(out, "# {} {}", signal.axis_label, signal.value_label)?;
    for (i, &v) in signal.values().iter().enumerate() {
        writeln!(out, "{} {}", fmt_float(signal.coord(i)), fmt_float(v))?;
    }
    Ok(())
}

/// Reads an RRDF table: two columns (r, value) with an optional header line
/// `# mode=density rho0=<v> Lhalf=<v>`. Without a header the values are
/// taken as d(r) directly with no cutoff.
pub fn read_rrdf<R: Read>(mut input: R) -> Result<RrdfInput> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;

    let mut mode = RrdfMode::Reduced;
    let mut l_half = f64::INFINITY;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if !line.starts_with('#') {
            continue;
        }
        let body = line.trim_start_matches('#').trim();
        if !body.contains("mode=") && !body.contains("rho0=") && !body.contains("Lhalf=") {
            continue;
        }
        let mut rho0 = None;
        let mut density = false;
        for tok in body.split_whitespace() {
            if let Some(v) = tok.strip_prefix("mode=") {
                match v {
                    "density" => density = true,
                    "reduced" => density = false,
                    other => {
                        return Err(Error::Parse {
                            line: idx + 1,
                            msg: format!("unknown mode {other:?}"),
                        })
                    }
                }
            } else if let Some(v) = tok.strip_prefix("rho0=") {
                rho0 = Some(v.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad rho0 {v:?}"),
                })?);
            } else if let Some(v) = tok.strip_prefix("Lhalf=") {
                l_half = v.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad Lhalf {v:?}"),
                })?;
            }
        }
        if density {
            let rho0 = rho0.ok_or(Error::Parse {
                line: idx + 1,
                msg: "mode=density requires rho0=".into(),
            })?;
            mode = RrdfMode::Density { rho0 };
        }
    }

    let (axis, values) = parse_two_columns(&text)?;
    RrdfInput::from_table(&axis, &values, mode, l_half)
}

/// Writes a (x, re, im, abs2) table, e.g. sampled psi(t) or its spectrum.
pub fn write_complex_table<W: Write>(
    mut out: W,
    x_name: &str,
    rows: impl Iterator<Item = (f64, Complex64)>,
) -> Result<()> {
    writeln!(out, "{x_name},re,im,abs2")?;
    for (x, v) in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_float(x),
            fmt_float(v.re),
            fmt_float(v.im),
            fmt_float(v.norm_sqr())
        )?;
    }
    Ok(())
}

/// Writes the modulus of a field as a long-format CSV with scale and
/// frequency axis columns.
pub fn write_modulus_csv<W: Write>(mut out: W, field: &CwtField) -> Result<()> {
    writeln!(out, "scale,nu,b,modulus")?;
    for i in 0..field.n_scales() {
        let a = field.scale(i);
        let nu = field.frequency(i);
        for j in 0..field.n_translations() {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_float(a),
                fmt_float(nu),
                fmt_float(field.b(j)),
                fmt_float(field.modulus(i, j))
            )?;
        }
    }
    Ok(())
}

/// Writes one component track as CSV.
pub fn write_track_csv<W: Write>(mut out: W, track: &crate::ridge::ComponentTrack) -> Result<()> {
    writeln!(out, "b,a_r,modulus,amplitude,freq_mod,freq_phase,boundary_flag")?;
    for (i, p) in track.source.points.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_float(p.b),
            fmt_float(p.a_r),
            fmt_float(p.modulus),
            fmt_float(track.amplitude[i]),
            fmt_float(track.freq_mod[i]),
            fmt_float(track.freq_phase[i]),
            u8::from(p.boundary_flag)
        )?;
    }
    Ok(())
}
