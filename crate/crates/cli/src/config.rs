//! Run configuration with layered precedence: command-line flags override a
//! `key=value` config file, which overrides the built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ridgeline::{RidgeConfig, WaveletKind};

/// Output format selectors for the transform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Bin,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "bin" => Ok(OutputFormat::Bin),
            other => bail!("unknown format {other:?} (expected csv, json or bin)"),
        }
    }
}

/// Optional values as parsed from flags or the config file; `None` means
/// "use the next layer down".
#[derive(Debug, Default, Clone, clap::Args)]
pub struct CommonOpts {
    /// Wavelet kind: new, morlet or mexican-hat
    #[arg(long, global = true)]
    pub kind: Option<String>,

    /// Oscillation parameter sigma
    #[arg(long, global = true)]
    pub sigma: Option<f64>,

    /// Lower edge of the analysis frequency band
    #[arg(long, global = true)]
    pub nu_min: Option<f64>,

    /// Upper edge of the analysis frequency band
    #[arg(long, global = true)]
    pub nu_max: Option<f64>,

    /// Scale-grid density in voices per octave
    #[arg(long, global = true)]
    pub voices: Option<u32>,

    /// Ridge noise floor relative to the field maximum
    #[arg(long, global = true)]
    pub noise_floor: Option<f64>,

    /// Output directory for generated files
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// Comma-separated output formats (csv, json, bin)
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// key=value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: WaveletKind,
    pub sigma: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    pub voices: u32,
    pub noise_floor: f64,
    pub max_jump_steps: f64,
    pub min_length: usize,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: WaveletKind::NewWavelet,
            sigma: 2.0,
            nu_min: 0.1,
            nu_max: 2.0,
            voices: 16,
            noise_floor: 1e-3,
            max_jump_steps: 1.5,
            min_length: 8,
            output_dir: PathBuf::from("."),
            formats: vec![OutputFormat::Bin, OutputFormat::Csv],
        }
    }
}

impl RunConfig {
    pub fn ridge_config(&self) -> RidgeConfig {
        RidgeConfig {
            noise_floor_rel: self.noise_floor,
            max_jump_steps: self.max_jump_steps,
            min_length: self.min_length,
        }
    }

    pub fn wants(&self, fmt: OutputFormat) -> bool {
        self.formats.contains(&fmt)
    }
}

fn parse_kind(s: &str) -> Result<WaveletKind> {
    match s {
        "new" | "new-wavelet" => Ok(WaveletKind::NewWavelet),
        "morlet" => Ok(WaveletKind::Morlet),
        "mexican-hat" | "mexhat" => Ok(WaveletKind::MexicanHat),
        other => bail!("unknown wavelet kind {other:?} (expected new, morlet or mexican-hat)"),
    }
}

fn read_key_value_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {} is not key=value: {line:?}", idx + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolves the layered configuration: defaults, then the config file, then
/// the flags.
pub fn resolve(opts: &CommonOpts) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();

    if let Some(path) = &opts.config {
        let map = read_key_value_file(path)?;
        for (key, value) in &map {
            match key.as_str() {
                "kind" => cfg.kind = parse_kind(value)?,
                "sigma" => cfg.sigma = value.parse().context("bad sigma in config")?,
                "nu_min" => cfg.nu_min = value.parse().context("bad nu_min in config")?,
                "nu_max" => cfg.nu_max = value.parse().context("bad nu_max in config")?,
                "voices" => cfg.voices = value.parse().context("bad voices in config")?,
                "noise_floor" => {
                    cfg.noise_floor = value.parse().context("bad noise_floor in config")?
                }
                "max_jump_steps" => {
                    cfg.max_jump_steps = value.parse().context("bad max_jump_steps in config")?
                }
                "min_length" => cfg.min_length = value.parse().context("bad min_length in config")?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "format" => cfg.formats = parse_formats(value)?,
                other => bail!("unknown config key {other:?}"),
            }
        }
    }

    if let Some(kind) = &opts.kind {
        cfg.kind = parse_kind(kind)?;
    }
    if let Some(sigma) = opts.sigma {
        cfg.sigma = sigma;
    }
    if let Some(v) = opts.nu_min {
        cfg.nu_min = v;
    }
    if let Some(v) = opts.nu_max {
        cfg.nu_max = v;
    }
    if let Some(v) = opts.voices {
        cfg.voices = v;
    }
    if let Some(v) = opts.noise_floor {
        cfg.noise_floor = v;
    }
    if let Some(v) = &opts.output_dir {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = &opts.format {
        cfg.formats = parse_formats(v)?;
    }

    if !cfg.nu_min.is_finite() || !cfg.nu_max.is_finite() || cfg.nu_min >= cfg.nu_max {
        bail!("need nu_min < nu_max, got [{}, {}]", cfg.nu_min, cfg.nu_max);
    }
    if cfg.voices < 4 {
        bail!("voices must be at least 4, got {}", cfg.voices);
    }
    if cfg.kind != WaveletKind::MexicanHat && (!cfg.sigma.is_finite() || cfg.sigma <= 0.0) {
        bail!("sigma must be positive, got {}", cfg.sigma);
    }
    Ok(cfg)
}

fn parse_formats(s: &str) -> Result<Vec<OutputFormat>> {
    s.split(',').map(|p| p.trim().parse()).collect()
}
