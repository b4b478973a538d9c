//! Test-signal synthesis, reduced radial distribution functions, Fourier
//! power spectra and least-squares model fits for component tracks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SignalSeries;

/// Closed-form synthetic signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// A cos(omega t).
    Tone { amplitude: f64, omega: f64 },
    /// sin(t^2); local frequency |t|/pi.
    Chirp,
    /// alpha e^(-beta r) sin(2 pi nu r) for r >= 0, zero before.
    DampedOscillation { alpha: f64, beta: f64, nu: f64 },
}

/// A synthetic signal recipe on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub t_min: f64,
    pub t_max: f64,
    pub dt: f64,
}

/// Samples the recipe's closed form.
pub fn synth(spec: &SyntheticSpec) -> Result<SignalSeries> {
    if !spec.dt.is_finite()
        || spec.dt <= 0.0
        || !spec.t_min.is_finite()
        || !spec.t_max.is_finite()
        || spec.t_min >= spec.t_max
    {
        return Err(Error::Contract(format!(
            "bad domain ({}, {}, dt={})",
            spec.t_min, spec.t_max, spec.dt
        )));
    }
    if let SyntheticKind::DampedOscillation { beta, .. } = spec.kind {
        if beta < 0.0 {
            return Err(Error::Contract(format!("decay rate must be >= 0, got {beta}")));
        }
    }
    let n = ((spec.t_max - spec.t_min) / spec.dt).round() as usize + 1;
    let f = |t: f64| match spec.kind {
        SyntheticKind::Tone { amplitude, omega } => amplitude * (omega * t).cos(),
        SyntheticKind::Chirp => (t * t).sin(),
        SyntheticKind::DampedOscillation { alpha, beta, nu } => {
            if t >= 0.0 {
                alpha * (-beta * t).exp() * (2.0 * std::f64::consts::PI * nu * t).sin()
            } else {
                0.0
            }
        }
    };
    let values = (0..n).map(|i| f(spec.t_min + i as f64 * spec.dt)).collect();
    SignalSeries::new(spec.t_min, spec.dt, values)
}

/// Input mode for RRDF construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RrdfMode {
    /// Samples are the atomic density rho(r); rho0 is the average density.
    Density { rho0: f64 },
    /// Samples are already the reduced RDF d(r).
    Reduced,
}

/// Tabulated radial data on a uniform positive axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RrdfInput {
    pub mode: RrdfMode,
    pub r0: f64,
    pub dr: f64,
    pub values: Vec<f64>,
    /// Domain cutoff: d(r) is zero outside 0 < r < l_half.
    pub l_half: f64,
}

impl RrdfInput {
    /// Builds the input from a tabulated (r, value) series, checking axis
    /// uniformity and positivity.
    pub fn from_table(r: &[f64], values: &[f64], mode: RrdfMode, l_half: f64) -> Result<Self> {
        if r.len() != values.len() || r.len() < 2 {
            return Err(Error::Contract("need matching r/value columns with >= 2 rows".into()));
        }
        if r[0] <= 0.0 {
            return Err(Error::Contract("r axis must be positive".into()));
        }
        let dr = r[1] - r[0];
        if !dr.is_finite() || dr <= 0.0 {
            return Err(Error::Contract("r axis must be increasing".into()));
        }
        for (i, pair) in r.windows(2).enumerate() {
            if ((pair[1] - pair[0]) - dr).abs() > 1e-6 * dr {
                return Err(Error::Contract(format!(
                    "non-uniform r axis near index {i}: step {} vs {}",
                    pair[1] - pair[0],
                    dr
                )));
            }
        }
        if let RrdfMode::Density { rho0 } = mode {
            if !rho0.is_finite() || rho0 <= 0.0 {
                return Err(Error::Contract(format!("rho0 must be positive, got {rho0}")));
            }
        }
        Ok(RrdfInput { mode, r0: r[0], dr, values: values.to_vec(), l_half })
    }
}

/// Builds d(r) = 4 pi r (rho(r) - rho0) on the input grid, zero outside
/// 0 < r < l_half. Reduced-mode inputs pass through (with the same cutoff).
pub fn rrdf_from_density(input: &RrdfInput) -> Result<SignalSeries> {
    let four_pi = 4.0 * std::f64::consts::PI;
    let values: Vec<f64> = input
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let r = input.r0 + i as f64 * input.dr;
            if r >= input.l_half {
                0.0
            } else {
                match input.mode {
                    RrdfMode::Density { rho0 } => four_pi * r * (v - rho0),
                    RrdfMode::Reduced => v,
                }
            }
        })
        .collect();
    Ok(SignalSeries::new(input.r0, input.dr, values)?.with_labels("r", "d"))
}

/// Options for [`power_spectrum_with`].
#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Zero-padding factor applied before the DFT.
    pub zero_pad: usize,
    /// Apply a Hann window before transforming. Off by default.
    pub hann: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { zero_pad: 4, hann: false }
    }
}

/// Discrete Fourier power spectrum with the default options (zero-padding
/// x4, no window). Frequencies are in cycles per axis unit; only the
/// positive-frequency half is returned.
pub fn power_spectrum(signal: &SignalSeries) -> Vec<(f64, f64)> {
    power_spectrum_with(signal, SpectrumOptions::default())
}

/// Power spectrum with explicit options.
pub fn power_spectrum_with(signal: &SignalSeries, opts: SpectrumOptions) -> Vec<(f64, f64)> {
    let n = signal.len();
    let len = n * opts.zero_pad.max(1);
    let mut buf = vec![Complex64::default(); len];
    for (i, (dst, &v)) in buf.iter_mut().zip(signal.values()).enumerate() {
        let w = if opts.hann {
            let x = std::f64::consts::PI * i as f64 / (n - 1).max(1) as f64;
            x.sin() * x.sin()
        } else {
            1.0
        };
        *dst = Complex64::new(v * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let dt = signal.dt();
    let scale = dt * dt;
    (0..=len / 2)
        .map(|k| {
            let nu = k as f64 / (len as f64 * dt);
            (nu, buf[k].norm_sqr() * scale)
        })
        .collect()
}

/// Fitted model tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    Exponential,
    Constant,
}

/// Parameters, uncertainties and residual of a model fit to a track.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: BTreeMap<String, f64>,
    pub errors: BTreeMap<String, f64>,
    pub range: (f64, f64),
    pub rms: f64,
    pub n_points: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

fn in_range(track: &[(f64, f64)], range: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    if !range.0.is_finite() || !range.1.is_finite() || range.0 >= range.1 {
        return Err(Error::Contract(format!("empty fit range [{}, {})", range.0, range.1)));
    }
    Ok(track
        .iter()
        .copied()
        .filter(|&(x, _)| x >= range.0 && x < range.1)
        .collect::<Vec<_>>())
}

/// Least-squares fit of A(x) ~ alpha e^(-beta x) over the half-open range,
/// as a straight line in (x, ln A). Standard errors come from the ordinary
/// unweighted linear fit; the rms residual is reported in ln-space.
pub fn fit_exponential(track: &[(f64, f64)], range: (f64, f64)) -> Result<FitResult> {
    let pts = in_range(track, range)?;
    if let Some(&(x, a)) = pts.iter().find(|&&(_, a)| a <= 0.0) {
        return Err(Error::Contract(format!(
            "exponential fit requires positive amplitudes; A({x}) = {a}"
        )));
    }
    let n = pts.len();
    if n < 8 {
        return Err(Error::InsufficientData(format!(
            "exponential fit needs >= 8 in-range points, got {n}"
        )));
    }
    let nf = n as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / nf;
    let ybar = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("degenerate abscissa in exponential fit".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let var = ssr / (nf - 2.0).max(1.0);
    let slope_err = (var / sxx).sqrt();
    let intercept_err = (var * (1.0 / nf + xbar * xbar / sxx)).sqrt();

    let alpha = intercept.exp();
    let mut params = BTreeMap::new();
    params.insert("alpha".into(), alpha);
    params.insert("beta".into(), -slope);
    let mut errors = BTreeMap::new();
    errors.insert("alpha".into(), alpha * intercept_err);
    errors.insert("beta".into(), slope_err);
    Ok(FitResult {
        model: FitModel::Exponential,
        params,
        errors,
        range,
        rms: (ssr / nf).sqrt(),
        n_points: n,
    })
}

/// Constant fit: the mean of y over the half-open range, with the standard
/// error of the mean as the uncertainty.
pub fn fit_constant(track: &[(f64, f64)], range: (f64, f64)) -> Result<FitResult> {
    let pts = in_range(track, range)?;
    let n = pts.len();
    if n == 0 {
        return Err(Error::InsufficientData("no points in fit range".into()));
    }
    let nf = n as f64;
    let mean = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let ssr: f64 = pts.iter().map(|p| (p.1 - mean) * (p.1 - mean)).sum();
    let sem = if n > 1 { (ssr / (nf - 1.0) / nf).sqrt() } else { 0.0 };
    let mut params = BTreeMap::new();
    params.insert("value".into(), mean);
    let mut errors = BTreeMap::new();
    errors.insert("value".into(), sem);
    Ok(FitResult {
        model: FitModel::Constant,
        params,
        errors,
        range,
        rms: (ssr / nf).sqrt(),
        n_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chirp_starts_at_zero() {
        let s = synth(&SyntheticSpec {
            kind: SyntheticKind::Chirp,
            t_min: 0.0,
            t_max: 1.0,
            dt: 0.25,
        })
        .unwrap();
        assert_eq!(s.values()[0], 0.0);
    }

    #[test]
    fn damped_starts_at_zero() {
        let s = synth(&SyntheticSpec {
            kind: SyntheticKind::DampedOscillation { alpha: 31.8, beta: 0.35, nu: 1.08 },
            t_min: 0.0,
            t_max: 1.0,
            dt: 0.1,
        })
        .unwrap();
        assert_eq!(s.values()[0], 0.0);
    }

    #[test]
    fn rrdf_homogeneous_density_vanishes() {
        let r: Vec<f64> = (1..100).map(|i| i as f64 * 0.1).collect();
        let rho = vec![0.8; r.len()];
        let input = RrdfInput::from_table(&r, &rho, RrdfMode::Density { rho0: 0.8 }, 25.0).unwrap();
        let d = rrdf_from_density(&input).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rrdf_inverts_algebraically() {
        // rho = rho0 + c / (4 pi r)  ->  d = c on the support
        let c = 2.5;
        let r: Vec<f64> = (1..200).map(|i| i as f64 * 0.05).collect();
        let rho: Vec<f64> = r.iter().map(|&r| 0.8 + c / (4.0 * std::f64::consts::PI * r)).collect();
        let input = RrdfInput::from_table(&r, &rho, RrdfMode::Density { rho0: 0.8 }, 8.0).unwrap();
        let d = rrdf_from_density(&input).unwrap();
        for (i, &v) in d.values().iter().enumerate() {
            let r_i = d.coord(i);
            if r_i < 8.0 {
                assert!((v - c).abs() < 1e-10, "d({r_i}) = {v}");
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn rrdf_spot_value() {
        let r: Vec<f64> = (1..=60).map(|i| i as f64 * 0.1).collect();
        let rho: Vec<f64> = r.iter().map(|&r| 0.8 + 0.1 * (r - 2.0).powi(2)).collect();
        let input = RrdfInput::from_table(&r, &rho, RrdfMode::Density { rho0: 0.8 }, 25.0).unwrap();
        let d = rrdf_from_density(&input).unwrap();
        // r = 2.0 is sample index 19
        let expect = 8.0 * std::f64::consts::PI * (rho[19] - 0.8);
        assert!((d.values()[19] - expect).abs() < 1e-12);
    }

    #[test]
    fn rrdf_rejects_non_uniform_axis() {
        let r = vec![0.1, 0.2, 0.35];
        let v = vec![1.0, 1.0, 1.0];
        assert!(matches!(
            RrdfInput::from_table(&r, &v, RrdfMode::Reduced, 25.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn rrdf_is_linear_in_density_contrast() {
        let r: Vec<f64> = (1..100).map(|i| i as f64 * 0.1).collect();
        let rho1: Vec<f64> = r.iter().map(|&r| 0.8 + (1.3 * r).sin() * 0.1).collect();
        let rho2: Vec<f64> = r.iter().map(|&r| 0.8 + (-0.2 * r).exp() * 0.05).collect();
        let combined: Vec<f64> = rho1.iter().zip(&rho2).map(|(a, b)| a + b - 0.8).collect();
        let mk = |rho: &[f64]| {
            rrdf_from_density(
                &RrdfInput::from_table(&r, rho, RrdfMode::Density { rho0: 0.8 }, 25.0).unwrap(),
            )
            .unwrap()
        };
        let d1 = mk(&rho1);
        let d2 = mk(&rho2);
        let dc = mk(&combined);
        for i in 0..r.len() {
            assert!((dc.values()[i] - d1.values()[i] - d2.values()[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn spectrum_peak_of_tone() {
        let spec = SyntheticSpec {
            kind: SyntheticKind::Tone { amplitude: 1.0, omega: 2.0 * std::f64::consts::PI * 1.08 },
            t_min: 0.0,
            t_max: 60.0,
            dt: 0.01,
        };
        let ps = power_spectrum(&synth(&spec).unwrap());
        let bin = ps[1].0 - ps[0].0;
        let peak = ps.iter().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        assert!((peak.0 - 1.08).abs() <= bin, "peak at {} (bin {bin})", peak.0);
    }

    #[test]
    fn spectrum_of_zero_is_zero() {
        let s = SignalSeries::new(0.0, 0.1, vec![0.0; 100]).unwrap();
        assert!(power_spectrum(&s).iter().all(|&(_, p)| p == 0.0));
    }

    #[test]
    fn spectrum_peak_of_damped_rrdf() {
        let spec = SyntheticSpec {
            kind: SyntheticKind::DampedOscillation { alpha: 31.8, beta: 0.35, nu: 1.08 },
            t_min: 0.005,
            t_max: 25.0,
            dt: 0.005,
        };
        let ps = power_spectrum(&synth(&spec).unwrap());
        let (pk_nu, pk_val) = *ps.iter().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        assert!((pk_nu - 1.08).abs() <= 0.01, "peak at {pk_nu}");
        // damping gives the peak a finite width: neighbours above half max
        let above: usize = ps.iter().filter(|&&(_, p)| p > 0.5 * pk_val).count();
        assert!(above > 1, "peak width {above} bins");
    }

    #[test]
    fn spectrum_and_cwt_frequency_axes_agree() {
        use crate::cwt::{transform, ScaleGrid};
        use crate::ridge::{freq_from_scale, link_ridges, RidgeConfig};
        use crate::wavelet::{MotherWavelet, WaveletKind};

        let nu0 = 1.08;
        let spec = SyntheticSpec {
            kind: SyntheticKind::Tone { amplitude: 1.0, omega: 2.0 * std::f64::consts::PI * nu0 },
            t_min: -20.0,
            t_max: 20.0,
            dt: 0.01,
        };
        let sig = synth(&spec).unwrap();
        let peak = power_spectrum(&sig)
            .into_iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap()
            .0;

        let w = MotherWavelet::new(WaveletKind::NewWavelet, 5.0).unwrap();
        let grid = ScaleGrid::log_spaced(&w, 0.5, 2.5, 16).unwrap();
        let field = transform(&sig, &w, &grid).unwrap();
        let ridges = link_ridges(&field, &RidgeConfig::default());
        let freqs: Vec<f64> = freq_from_scale(&ridges[0], &w)
            .into_iter()
            .filter(|(b, _)| b.abs() < 10.0)
            .map(|(_, nu)| nu)
            .collect();
        let nu_cwt = freqs.iter().sum::<f64>() / freqs.len() as f64;
        assert!(
            (nu_cwt / peak - 1.0).abs() < 0.02,
            "cwt {nu_cwt} vs spectrum peak {peak}"
        );
    }

    #[test]
    fn exponential_fit_recovers_exact_parameters() {
        let track: Vec<(f64, f64)> =
            (0..200).map(|i| (i as f64 * 0.1, 31.8 * (-0.35 * i as f64 * 0.1).exp())).collect();
        let fit = fit_exponential(&track, (0.0, 20.0)).unwrap();
        assert!((fit.param("alpha").unwrap() - 31.8).abs() < 1e-10);
        assert!((fit.param("beta").unwrap() - 0.35).abs() < 1e-12);
        assert!(fit.rms <= 1e-10);
    }

    #[test]
    fn exponential_fit_flat_data_gives_zero_decay() {
        let track: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 3.0)).collect();
        let fit = fit_exponential(&track, (0.0, 50.0)).unwrap();
        assert!(fit.param("beta").unwrap().abs() < 1e-12);
        assert!(fit.errors["beta"] < 1e-12);
    }

    #[test]
    fn exponential_fit_error_paths() {
        let bad: Vec<(f64, f64)> = vec![(0.0, 1.0), (1.0, -0.5), (2.0, 1.0)];
        assert!(matches!(fit_exponential(&bad, (0.0, 3.0)), Err(Error::Contract(_))));
        let few: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(fit_exponential(&few, (0.0, 5.0)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn constant_fit_values() {
        let exact: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.08)).collect();
        let fit = fit_constant(&exact, (0.0, 10.0)).unwrap();
        assert_eq!(fit.param("value").unwrap(), 1.08);
        assert_eq!(fit.rms, 0.0);
        let two = vec![(0.0, 1.0), (1.0, 1.2)];
        let fit = fit_constant(&two, (0.0, 2.0)).unwrap();
        assert!((fit.param("value").unwrap() - 1.1).abs() < 1e-12);
        assert!(matches!(
            fit_constant(&two, (5.0, 6.0)),
            Err(Error::InsufficientData(_))
        ));
    }

    proptest! {
        #[test]
        fn exponential_roundtrip(alpha in 0.1f64..100.0, beta in 0.0f64..2.0) {
            let track: Vec<(f64, f64)> =
                (0..40).map(|i| {
                    let x = i as f64 * 0.25;
                    (x, alpha * (-beta * x).exp())
                }).collect();
            let fit = fit_exponential(&track, (0.0, 10.0)).unwrap();
            prop_assert!((fit.param("alpha").unwrap() / alpha - 1.0).abs() < 1e-10);
            prop_assert!((fit.param("beta").unwrap() - beta).abs() < 1e-10);
        }

        #[test]
        fn constant_fit_bounded_by_data(values in proptest::collection::vec(0.5f64..2.0, 3..40)) {
            let track: Vec<(f64, f64)> =
                values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect();
            let fit = fit_constant(&track, (0.0, track.len() as f64)).unwrap();
            let v = fit.param("value").unwrap();
            let lo = values.iter().cloned().fold(f64::MAX, f64::min);
            let hi = values.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }
}
