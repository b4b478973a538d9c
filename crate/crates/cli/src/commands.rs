//! Subcommand implementations.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use ridgeline::io as rio;
use ridgeline::model::power_spectrum_with;
use ridgeline::{
    component_track, env_variance_analytic, env_variance_numeric, fit_constant, fit_exponential,
    link_ridges, mean_freq_analytic, mean_freq_numeric, mode_freq_numeric, reconstruct, synth,
    transform, CwtField, MotherWavelet, Ridge, ScaleGrid, SignalSeries, SpectrumOptions,
    SyntheticKind, SyntheticSpec, WaveletKind,
};

use crate::config::{OutputFormat, RunConfig};
use crate::util::atomic_write;

fn build_wavelet(cfg: &RunConfig) -> Result<MotherWavelet> {
    Ok(MotherWavelet::new(cfg.kind, cfg.sigma)?)
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

// ---------------------------------------------------------------- wavelet

#[derive(Debug, Clone, clap::Args)]
pub struct WaveletArgs {
    /// Sampling start for the time table
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    pub t_min: f64,
    /// Sampling end for the time table
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    pub t_max: f64,
    /// Sampling step for the time table
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Also write the squared envelope table
    #[arg(long)]
    pub envelope: bool,
    /// Also write the spectrum table
    #[arg(long)]
    pub spectrum: bool,
    /// Write a derived-constant table over sigma: omega-psi or sigma-psi
    #[arg(long)]
    pub table: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub sigma_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sigma_step: f64,
}

pub fn cmd_wavelet(cfg: &RunConfig, args: &WaveletArgs) -> Result<()> {
    let w = build_wavelet(cfg)?;
    if !(args.dt > 0.0 && args.t_min < args.t_max) {
        bail!("bad time table domain");
    }
    let n = ((args.t_max - args.t_min) / args.dt).round() as usize + 1;
    let ts: Vec<f64> = (0..n).map(|i| args.t_min + i as f64 * args.dt).collect();

    atomic_write(&out_path(cfg, "wavelet_psi.csv"), |out| {
        Ok(rio::write_complex_table(out, "t", ts.iter().map(|&t| (t, w.eval(t))))?)
    })?;

    if args.envelope {
        atomic_write(&out_path(cfg, "wavelet_envelope.csv"), |out| {
            writeln!(out, "t,abs2")?;
            for &t in &ts {
                writeln!(out, "{},{}", rio::fmt_float(t), rio::fmt_float(w.eval(t).norm_sqr()))?;
            }
            Ok(())
        })?;
    }

    if args.spectrum {
        let lo = -4.0;
        let hi = w.sigma() + 12.0;
        let m = ((hi - lo) / 0.01).round() as usize + 1;
        let samples = w.sample_spectrum((0..m).map(|i| lo + i as f64 * 0.01));
        atomic_write(&out_path(cfg, "wavelet_spectrum.csv"), |out| {
            Ok(rio::write_complex_table(
                out,
                "omega",
                samples.iter().map(|s| (s.omega, s.value)),
            )?)
        })?;
    }

    if let Some(table) = &args.table {
        if !(args.sigma_step > 0.0 && args.sigma_min > 0.0 && args.sigma_min <= args.sigma_max) {
            bail!("bad sigma table range");
        }
        let mut sigmas = Vec::new();
        let mut s = args.sigma_min;
        while s <= args.sigma_max + 1e-12 {
            sigmas.push(s);
            s += args.sigma_step;
        }
        match table.as_str() {
            "omega-psi" => {
                atomic_write(&out_path(cfg, "table_omega_psi.csv"), |out| {
                    writeln!(out, "sigma,analytic,numeric_mean,numeric_mode")?;
                    for &s in &sigmas {
                        let w = MotherWavelet::new(WaveletKind::NewWavelet, s)?;
                        writeln!(
                            out,
                            "{},{},{},{}",
                            rio::fmt_float(s),
                            rio::fmt_float(mean_freq_analytic(s)),
                            rio::fmt_float(mean_freq_numeric(&w)?),
                            rio::fmt_float(mode_freq_numeric(&w))
                        )?;
                    }
                    Ok(())
                })?;
            }
            "sigma-psi" => {
                atomic_write(&out_path(cfg, "table_sigma_psi.csv"), |out| {
                    writeln!(out, "sigma,analytic,numeric")?;
                    for &s in &sigmas {
                        let w = MotherWavelet::new(WaveletKind::NewWavelet, s)?;
                        writeln!(
                            out,
                            "{},{},{}",
                            rio::fmt_float(s),
                            rio::fmt_float(env_variance_analytic(s)),
                            rio::fmt_float(env_variance_numeric(&w)?)
                        )?;
                    }
                    Ok(())
                })?;
            }
            other => bail!("unknown table {other:?} (expected omega-psi or sigma-psi)"),
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ synth

#[derive(Debug, Clone, clap::Args)]
pub struct SynthArgs {
    /// Signal kind: tone, chirp or damped
    #[arg(long)]
    pub signal: String,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Angular frequency of the tone
    #[arg(long, default_value_t = 5.0)]
    pub omega: f64,
    /// Damped-oscillation amplitude
    #[arg(long, default_value_t = 31.8)]
    pub alpha: f64,
    /// Damped-oscillation decay rate
    #[arg(long, default_value_t = 0.35)]
    pub beta: f64,
    /// Damped-oscillation frequency in cycles per unit
    #[arg(long, default_value_t = 1.08)]
    pub nu: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long)]
    pub dt: f64,
    /// Output file (defaults to signal.txt in the output directory)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_synth(cfg: &RunConfig, args: &SynthArgs) -> Result<()> {
    let kind = match args.signal.as_str() {
        "tone" => SyntheticKind::Tone { amplitude: args.amplitude, omega: args.omega },
        "chirp" => SyntheticKind::Chirp,
        "damped" => SyntheticKind::DampedOscillation {
            alpha: args.alpha,
            beta: args.beta,
            nu: args.nu,
        },
        other => bail!("unknown signal kind {other:?} (expected tone, chirp or damped)"),
    };
    let sig = synth(&SyntheticSpec { kind, t_min: args.t_min, t_max: args.t_max, dt: args.dt })?;
    let path = args.output.clone().unwrap_or_else(|| out_path(cfg, "signal.txt"));
    atomic_write(&path, |out| Ok(rio::write_signal_text(out, &sig)?))
}

// -------------------------------------------------------------- transform

#[derive(Debug, Clone, clap::Args)]
pub struct TransformArgs {
    /// Input two-column signal file
    #[arg(long)]
    pub input: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| {
        format!("cannot open {}", path.display())
    })?))
}

/// Loads a two-column series. A file carrying an RRDF header
/// (`# mode=density rho0=... Lhalf=...`) is converted to the reduced radial
/// distribution function d(r) = 4 pi r (rho - rho0) on the way in.
fn load_series(path: &Path) -> Result<SignalSeries> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let is_rrdf = text
        .lines()
        .take_while(|l| l.trim_start().starts_with('#'))
        .any(|l| l.contains("mode="));
    if is_rrdf {
        let input = rio::read_rrdf(text.as_bytes())?;
        Ok(ridgeline::rrdf_from_density(&input)?)
    } else {
        Ok(rio::read_signal_text(text.as_bytes())?)
    }
}

pub fn cmd_transform(cfg: &RunConfig, args: &TransformArgs) -> Result<()> {
    let sig = load_series(&args.input)?;
    let w = build_wavelet(cfg)?;
    let grid = ScaleGrid::log_spaced(&w, cfg.nu_min, cfg.nu_max, cfg.voices)?;
    let field = transform(&sig, &w, &grid)?;

    for i in 0..field.n_scales() {
        if field.row_under_resolved(i) {
            eprintln!(
                "warning: under-resolved scale a = {} (row {})",
                field.scale(i),
                i
            );
        }
    }

    if cfg.wants(OutputFormat::Bin) {
        atomic_write(&out_path(cfg, "grid.cwtf"), |out| Ok(rio::write_cwtf(out, &field)?))?;
    }
    if cfg.wants(OutputFormat::Csv) {
        atomic_write(&out_path(cfg, "modulus.csv"), |out| {
            Ok(rio::write_modulus_csv(out, &field)?)
        })?;
    }

    println!(
        "kind={:?} sigma={} n_scales={} n_translations={} nu=[{:.6}, {:.6}] b=[{:.6}, {:.6}]",
        w.kind(),
        w.sigma(),
        field.n_scales(),
        field.n_translations(),
        field.frequency(field.n_scales() - 1),
        field.frequency(0),
        field.b(0),
        field.b(field.n_translations() - 1),
    );
    Ok(())
}

// ---------------------------------------------------------------- extract

#[derive(Debug, Clone, clap::Args)]
pub struct ExtractArgs {
    /// Input CWTF grid file
    #[arg(long)]
    pub grid: PathBuf,
    /// Fit request, e.g. exp:5:18 (amplitude) or const:5:18 (frequency);
    /// applies to the dominant ridge and may be repeated
    #[arg(long)]
    pub fit: Vec<String>,
}

#[derive(Serialize)]
struct RidgeEntry {
    id: usize,
    file: String,
    n_points: usize,
    b_min: f64,
    b_max: f64,
    weight: f64,
}

#[derive(Serialize)]
struct Manifest {
    ridges: Vec<RidgeEntry>,
    fits: Vec<ridgeline::FitResult>,
}

fn parse_fit(spec: &str) -> Result<(&str, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("fit spec must be model:lo:hi, got {spec:?}");
    }
    let lo: f64 = parts[1].parse().with_context(|| format!("bad fit range in {spec:?}"))?;
    let hi: f64 = parts[2].parse().with_context(|| format!("bad fit range in {spec:?}"))?;
    Ok((parts[0], lo, hi))
}

pub fn cmd_extract(cfg: &RunConfig, args: &ExtractArgs) -> Result<()> {
    let data = rio::read_cwtf(open(&args.grid)?)?;
    let w = build_wavelet(cfg)?;
    let field: CwtField = data.into_field(w)?;
    let ridges = link_ridges(&field, &cfg.ridge_config());

    if ridges.is_empty() {
        eprintln!("warning: no ridges found; writing empty manifest");
    }

    let mut entries = Vec::new();
    let mut tracks = Vec::new();
    for (id, ridge) in ridges.iter().enumerate() {
        let track = component_track(ridge, &field, &w)?;
        let file = format!("track_{id:03}.csv");
        atomic_write(&out_path(cfg, &file), |out| Ok(rio::write_track_csv(out, &track)?))?;
        entries.push(RidgeEntry {
            id,
            file,
            n_points: ridge.len(),
            b_min: ridge.points[0].b,
            b_max: ridge.points[ridge.len() - 1].b,
            weight: ridge.weight(),
        });
        tracks.push(track);
    }

    let mut fits = Vec::new();
    if !args.fit.is_empty() {
        let dominant = ridges
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.weight().partial_cmp(&b.1.weight()).unwrap())
            .map(|(i, _)| i);
        let Some(idx) = dominant else {
            return Err(ridgeline::Error::InsufficientData("no ridge to fit".into()).into());
        };
        let ridge: &Ridge = &ridges[idx];
        let track = &tracks[idx];
        for spec in &args.fit {
            let (model, lo, hi) = parse_fit(spec)?;
            // boundary-flagged samples are contaminated by the signal edge
            let clean = |ys: &[f64]| -> Vec<(f64, f64)> {
                ridge
                    .points
                    .iter()
                    .zip(ys)
                    .filter(|(p, _)| !p.boundary_flag)
                    .map(|(p, &y)| (p.b, y))
                    .collect()
            };
            let fit = match model {
                "exp" => fit_exponential(&clean(&track.amplitude), (lo, hi))?,
                "const" => fit_constant(&clean(&track.freq_mod), (lo, hi))?,
                other => bail!("unknown fit model {other:?} (expected exp or const)"),
            };
            fits.push(fit);
        }
    }

    let manifest = Manifest { ridges: entries, fits };
    atomic_write(&out_path(cfg, "manifest.json"), |out| {
        serde_json::to_writer_pretty(&mut *out, &manifest)?;
        writeln!(out)?;
        Ok(())
    })
}

// --------------------------------------------------------------- spectrum

#[derive(Debug, Clone, clap::Args)]
pub struct SpectrumArgs {
    /// Input two-column signal file
    #[arg(long)]
    pub input: PathBuf,
    /// Apply a Hann window before transforming
    #[arg(long)]
    pub hann: bool,
}

pub fn cmd_spectrum(cfg: &RunConfig, args: &SpectrumArgs) -> Result<()> {
    let sig = load_series(&args.input)?;
    let ps = power_spectrum_with(&sig, SpectrumOptions { hann: args.hann, ..Default::default() });
    atomic_write(&out_path(cfg, "spectrum.csv"), |out| {
        writeln!(out, "nu,power")?;
        for (nu, p) in &ps {
            writeln!(out, "{},{}", rio::fmt_float(*nu), rio::fmt_float(*p))?;
        }
        Ok(())
    })
}

// ------------------------------------------------------------ reconstruct

#[derive(Debug, Clone, clap::Args)]
pub struct ReconstructArgs {
    /// Input CWTF grid file
    #[arg(long)]
    pub grid: PathBuf,
    /// Output file (defaults to reconstructed.txt in the output directory)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn cmd_reconstruct(cfg: &RunConfig, args: &ReconstructArgs) -> Result<()> {
    let data = rio::read_cwtf(open(&args.grid)?)?;
    let w = build_wavelet(cfg)?;
    let field = data.into_field(w)?;
    let rec: SignalSeries = reconstruct(&field)?;
    let path = args.output.clone().unwrap_or_else(|| out_path(cfg, "reconstructed.txt"));
    atomic_write(&path, |out| Ok(rio::write_signal_text(out, &rec)?))
}
