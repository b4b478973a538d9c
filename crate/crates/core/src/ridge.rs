//! Scale-space ridges and the instantaneous quantities they carry.
//!
//! At every translation the moduli |F(a, b)| are scanned for local maxima
//! over scale; the maxima are refined by quadratic interpolation of |F|^2
//! in log a (the ridge cross-section is near-Gaussian there), linked into
//! continuous ridges and turned into amplitude and frequency tracks. The
//! module also hosts the stationary-phase modulus prediction used as a
//! validation oracle for the transform.

use crate::cwt::CwtField;
use crate::error::{Error, Result};
use crate::numerics::{parabola_vertex, unwrap_phase};
use crate::wavelet::MotherWavelet;

/// Tunable ridge-extraction parameters.
#[derive(Debug, Clone, Copy)]
pub struct RidgeConfig {
    /// Maxima below this fraction of the global field maximum are noise.
    pub noise_floor_rel: f64,
    /// Largest allowed |delta log a| between linked points, in grid steps.
    pub max_jump_steps: f64,
    /// Ridges shorter than this many columns are dropped.
    pub min_length: usize,
}

impl Default for RidgeConfig {
    fn default() -> Self {
        RidgeConfig {
            noise_floor_rel: 1e-3,
            max_jump_steps: 1.5,
            min_length: 8,
        }
    }
}

/// One refined scale maximum.
#[derive(Debug, Clone, Copy)]
pub struct RidgePoint {
    /// Translation coordinate.
    pub b: f64,
    /// Interpolated ridge scale.
    pub a_r: f64,
    /// |F| at the interpolated maximum.
    pub modulus: f64,
    /// Arg F at the nearest scale-grid node, in (-pi, pi].
    pub phase: f64,
    /// Cone-of-influence contamination flag.
    pub boundary_flag: bool,
}

/// A linked curve of ridge points, strictly increasing in `b`.
#[derive(Debug, Clone)]
pub struct Ridge {
    pub points: Vec<RidgePoint>,
}

impl Ridge {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total modulus along the ridge; used to rank ridges by strength.
    pub fn weight(&self) -> f64 {
        self.points.iter().map(|p| p.modulus).sum()
    }
}

/// Amplitude and frequency series extracted from one ridge.
#[derive(Debug, Clone)]
pub struct ComponentTrack {
    pub b: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub freq_mod: Vec<f64>,
    pub freq_phase: Vec<f64>,
    pub source: Ridge,
}

/// All strict interior local maxima of |F(., b)| along the scale axis at
/// column `b_index`, refined in (log a, |F|^2) and filtered against the
/// noise floor. May be empty.
pub fn scale_maxima(field: &CwtField, b_index: usize, cfg: &RidgeConfig) -> Vec<RidgePoint> {
    let n_s = field.n_scales();
    let mut floor = 0.0f64;
    for i in 0..n_s {
        for j in 0..field.n_translations() {
            floor = floor.max(field.modulus(i, j));
        }
    }
    let floor2 = (cfg.noise_floor_rel * floor).powi(2);

    let mut out = Vec::new();
    let col: Vec<f64> = (0..n_s).map(|i| field.value(i, b_index).norm_sqr()).collect();
    for i in 1..n_s.saturating_sub(1) {
        if col[i] > col[i - 1] && col[i] > col[i + 1] && col[i] > floor2 {
            let x0 = field.scale(i).ln();
            let h_lo = x0 - field.scale(i - 1).ln();
            let h_hi = field.scale(i + 1).ln() - x0;
            let h = 0.5 * (h_lo + h_hi);
            let (x, y) = parabola_vertex(x0, h, col[i - 1], col[i], col[i + 1]);
            let mut phase = field.value(i, b_index).arg();
            if phase <= -std::f64::consts::PI {
                phase = std::f64::consts::PI;
            }
            out.push(RidgePoint {
                b: field.b(b_index),
                a_r: x.exp(),
                modulus: y.max(0.0).sqrt(),
                phase,
                boundary_flag: field.boundary_flag(i, b_index),
            });
        }
    }
    out
}

/// Greedy nearest-neighbor linking of per-column maxima in log a.
///
/// Candidate continuations within `max_jump_steps` grid steps are taken in
/// order of |delta log a|, ties broken toward the larger modulus; unmatched
/// maxima open new ridges and unmatched ridges close. Ridges shorter than
/// `min_length` are discarded, as are ridges that never leave the margin
/// where the truncated wavelet overlaps the signal boundary: a curve
/// confined there is indistinguishable from truncation ringing of the
/// zero-extended record. Fully deterministic.
pub fn link_ridges(field: &CwtField, cfg: &RidgeConfig) -> Vec<Ridge> {
    let step = field.grid().mean_log_step();
    let max_jump = cfg.max_jump_steps * step;

    let mut open: Vec<Vec<RidgePoint>> = Vec::new();
    let mut done: Vec<Vec<RidgePoint>> = Vec::new();

    for j in 0..field.n_translations() {
        let maxima = scale_maxima(field, j, cfg);

        // candidate links (ridge k, maximum m) sorted by closeness
        let mut cands: Vec<(f64, f64, usize, usize)> = Vec::new();
        for (k, r) in open.iter().enumerate() {
            let last = r.last().unwrap();
            for (m, pt) in maxima.iter().enumerate() {
                let d = (pt.a_r / last.a_r).ln().abs();
                if d <= max_jump {
                    cands.push((d, -pt.modulus, k, m));
                }
            }
        }
        cands.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
                .then(a.2.cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });

        let mut ridge_taken = vec![false; open.len()];
        let mut max_taken = vec![false; maxima.len()];
        let mut extend: Vec<(usize, usize)> = Vec::new();
        for (_, _, k, m) in cands {
            if !ridge_taken[k] && !max_taken[m] {
                ridge_taken[k] = true;
                max_taken[m] = true;
                extend.push((k, m));
            }
        }

        for &(k, m) in &extend {
            open[k].push(maxima[m]);
        }
        // close unmatched ridges (in reverse so removal indexes stay valid)
        for k in (0..ridge_taken.len()).rev() {
            if !ridge_taken[k] {
                done.push(open.remove(k));
            }
        }
        for (m, pt) in maxima.iter().enumerate() {
            if !max_taken[m] {
                open.push(vec![*pt]);
            }
        }
    }
    done.extend(open);

    // Edge ringing of the zero-extended record stays above the default
    // noise floor out to roughly five envelope widths from the boundary
    // (the 1e-3-mass cone ends at 3.1); a ridge confined to that margin on
    // either side carries no trustworthy sample.
    const RINGING_MARGIN_Z: f64 = 5.0;
    let b_start = field.b(0);
    let b_end = field.b(field.n_translations() - 1);
    let sigma_psi = field.wavelet().sigma_psi();
    let has_clean_point = |points: &[RidgePoint]| {
        points.iter().any(|p| {
            let r = RINGING_MARGIN_Z * p.a_r * sigma_psi;
            p.b - b_start >= r && b_end - p.b >= r
        })
    };

    let mut ridges: Vec<Ridge> = done
        .into_iter()
        .filter(|p| p.len() >= cfg.min_length && has_clean_point(p))
        .map(|points| Ridge { points })
        .collect();
    ridges.sort_by(|x, y| {
        x.points[0]
            .b
            .partial_cmp(&y.points[0].b)
            .unwrap()
            .then(x.points[0].a_r.partial_cmp(&y.points[0].a_r).unwrap())
    });
    ridges
}

/// Instantaneous amplitude along a ridge:
/// A_f(b) = (pi sigma_psi^2 / 2)^(-1/4) |F(a_r(b), b)|.
pub fn amplitude_track(ridge: &Ridge, w: &MotherWavelet) -> Vec<(f64, f64)> {
    let norm = (0.5 * std::f64::consts::PI * w.env_variance()).powf(-0.25);
    ridge.points.iter().map(|p| (p.b, norm * p.modulus)).collect()
}

/// Scale-based instantaneous frequency: nu(b) = omega_psi / (2 pi a_r(b)).
pub fn freq_from_scale(ridge: &Ridge, w: &MotherWavelet) -> Vec<(f64, f64)> {
    let c = w.mean_freq() / (2.0 * std::f64::consts::PI);
    ridge.points.iter().map(|p| (p.b, c / p.a_r)).collect()
}

/// Phase-based instantaneous frequency: the unwrapped phase along the ridge
/// differentiated by central differences (one-sided at the ends), divided by
/// 2 pi; the sign is discarded.
pub fn freq_from_phase(ridge: &Ridge, field: &CwtField) -> Result<Vec<(f64, f64)>> {
    let n = ridge.points.len();
    if n < 3 {
        return Err(Error::Contract(format!(
            "phase differentiation needs at least 3 ridge points, got {n}"
        )));
    }
    let _ = field;
    let mut phases: Vec<f64> = ridge.points.iter().map(|p| p.phase).collect();
    unwrap_phase(&mut phases);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (dphi, db) = if i == 0 {
            (phases[1] - phases[0], ridge.points[1].b - ridge.points[0].b)
        } else if i == n - 1 {
            (phases[n - 1] - phases[n - 2], ridge.points[n - 1].b - ridge.points[n - 2].b)
        } else {
            (phases[i + 1] - phases[i - 1], ridge.points[i + 1].b - ridge.points[i - 1].b)
        };
        out.push((ridge.points[i].b, (dphi / db).abs() / two_pi));
    }
    Ok(out)
}

/// Assembles the full per-ridge track (amplitude plus both frequency
/// estimators).
pub fn component_track(ridge: &Ridge, field: &CwtField, w: &MotherWavelet) -> Result<ComponentTrack> {
    let amp = amplitude_track(ridge, w);
    let fmod = freq_from_scale(ridge, w);
    let fph = freq_from_phase(ridge, field)?;
    Ok(ComponentTrack {
        b: ridge.points.iter().map(|p| p.b).collect(),
        amplitude: amp.into_iter().map(|(_, v)| v).collect(),
        freq_mod: fmod.into_iter().map(|(_, v)| v).collect(),
        freq_phase: fph.into_iter().map(|(_, v)| v).collect(),
        source: ridge.clone(),
    })
}

/// Local signal model at the stationary point: amplitude and phase
/// derivatives of the analytic representation f = Re[A e^{i phi}].
#[derive(Debug, Clone, Copy)]
pub struct SignalModel {
    pub amplitude: f64,
    pub phase: f64,
    pub phase_rate: f64,
    /// phi''(t_s); the wavelet's own frequency is treated as constant.
    pub phase_curvature: f64,
}

/// Stationary-phase prediction for |F(a, b)| given the signal model at the
/// stationary point `t_s`. With `slow_variation` the curvature correction
/// factor is dropped (valid when |phi''| a^2 sigma_psi^2 << 1). Used as a
/// validation oracle against computed transforms.
pub fn stationary_phase_modulus(
    w: &MotherWavelet,
    a: f64,
    b: f64,
    model: &SignalModel,
    t_s: f64,
    slow_variation: bool,
) -> f64 {
    let s2 = w.env_variance();
    let sp = s2.sqrt();
    let c2 = model.phase_curvature * model.phase_curvature;
    let base = (0.5 * std::f64::consts::PI).sqrt() * sp * model.amplitude * model.amplitude;
    let d = t_s - b;
    let f2 = if slow_variation {
        base * (-a * a * s2 * c2 * d * d).exp()
    } else {
        let denom = 1.0 + 4.0 * a.powi(4) * s2 * s2 * c2;
        base / denom.sqrt() * (-a * a * s2 * c2 * d * d / denom).exp()
    };
    f2.sqrt()
}
