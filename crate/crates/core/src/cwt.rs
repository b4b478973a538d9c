//! The continuous wavelet transform engine and its inverse.
//!
//! `transform` computes F(a,b) = |a|^-1 int psi*((t-b)/a) f(t) dt on the
//! sample grid of the input, treating the signal as zero outside its
//! sampled range. Two interchangeable evaluation paths are provided: a
//! fast-convolution path (one FFT per scale row) and a direct quadrature
//! reference; both truncate the wavelet identically, so they agree to
//! floating-point rounding.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::signal::SignalSeries;
use crate::wavelet::{spectrum_scale_factor, MotherWavelet};

/// Truncation radius of the sampled wavelet, in units of its argument:
/// |t - b|/a <= TRUNC_FACTOR * max(1, sigma_psi). The Gaussian envelope is
/// below 1e-12 of its peak beyond that.
const TRUNC_FACTOR: f64 = 7.5;

/// One-sided standard-normal quantile for a 1e-3 tail, used by the
/// cone-of-influence flag: a column is boundary-contaminated when more than
/// 1e-3 of the (Gaussian-approximated) envelope mass hangs over the edge.
const COI_Z: f64 = 3.090_232_306_167_813;

/// Strictly increasing grid of positive scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    scales: Vec<f64>,
}

impl ScaleGrid {
    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::Contract("scale grid must not be empty".into()));
        }
        if scales.iter().any(|a| !a.is_finite()) || scales[0] <= 0.0 {
            return Err(Error::Contract("scales must be positive and finite".into()));
        }
        for w in scales.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Contract("scales must be strictly increasing".into()));
            }
        }
        Ok(ScaleGrid { scales })
    }

    /// Logarithmic grid covering the frequency band `[nu_min, nu_max]` with
    /// the given number of voices per octave, through the scale/frequency
    /// relation a = omega_psi / (2 pi nu).
    pub fn log_spaced(w: &MotherWavelet, nu_min: f64, nu_max: f64, voices: u32) -> Result<Self> {
        if !nu_min.is_finite() || !nu_max.is_finite() || nu_min <= 0.0 || nu_max <= nu_min {
            return Err(Error::Contract(format!(
                "need 0 < nu_min < nu_max, got [{nu_min}, {nu_max}]"
            )));
        }
        if voices == 0 {
            return Err(Error::Contract("voices must be positive".into()));
        }
        let a_min = w.mean_freq() / (2.0 * std::f64::consts::PI * nu_max);
        let a_max = w.mean_freq() / (2.0 * std::f64::consts::PI * nu_min);
        let octaves = (a_max / a_min).log2();
        let n = (octaves * voices as f64).ceil() as usize + 1;
        let ratio = (a_max / a_min).powf(1.0 / (n - 1) as f64);
        let scales = (0..n).map(|i| a_min * ratio.powi(i as i32)).collect();
        ScaleGrid::new(scales)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mean spacing in log scale.
    pub fn mean_log_step(&self) -> f64 {
        if self.scales.len() < 2 {
            return 0.0;
        }
        (self.scales[self.scales.len() - 1] / self.scales[0]).ln() / (self.scales.len() - 1) as f64
    }
}

/// Frequency corresponding to scale `a`: nu = omega_psi / (2 pi a), using
/// the wavelet's authoritative mean frequency.
pub fn scale_to_frequency(w: &MotherWavelet, a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Contract(format!("scale must be positive, got {a}")));
    }
    Ok(w.mean_freq() / (2.0 * std::f64::consts::PI * a))
}

/// The complex transform F(a,b) over a scale grid and the signal's sample
/// axis, together with the wavelet that produced it.
#[derive(Debug, Clone)]
pub struct CwtField {
    grid: ScaleGrid,
    b0: f64,
    db: f64,
    values: Array2<Complex64>,
    wavelet: MotherWavelet,
    under_resolved: Vec<bool>,
}

impl CwtField {
    /// Reassembles a field from stored parts (e.g. a grid file).
    pub fn from_parts(
        grid: ScaleGrid,
        b0: f64,
        db: f64,
        values: Array2<Complex64>,
        wavelet: MotherWavelet,
    ) -> Result<Self> {
        if values.nrows() != grid.len() {
            return Err(Error::Contract(format!(
                "matrix has {} rows for {} scales",
                values.nrows(),
                grid.len()
            )));
        }
        if values.ncols() == 0 {
            return Err(Error::Contract("field must have at least one column".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Contract("field contains non-finite entries".into()));
        }
        if !db.is_finite() || db <= 0.0 {
            return Err(Error::Contract(format!("bad translation step {db}")));
        }
        let under_resolved = grid
            .scales()
            .iter()
            .map(|&a| under_resolved(&wavelet, a, db))
            .collect();
        Ok(CwtField {
            grid,
            b0,
            db,
            values,
            wavelet,
            under_resolved,
        })
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn wavelet(&self) -> &MotherWavelet {
        &self.wavelet
    }

    pub fn n_scales(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_translations(&self) -> usize {
        self.values.ncols()
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn db(&self) -> f64 {
        self.db
    }

    /// Translation coordinate of column `j`.
    pub fn b(&self, j: usize) -> f64 {
        self.b0 + j as f64 * self.db
    }

    pub fn scale(&self, i: usize) -> f64 {
        self.grid.scales()[i]
    }

    /// Frequency of scale row `i`.
    pub fn frequency(&self, i: usize) -> f64 {
        self.wavelet.mean_freq() / (2.0 * std::f64::consts::PI * self.scale(i))
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[(i, j)]
    }

    pub fn modulus(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)].norm()
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// True when row `i` was computed at a scale too small for the sample
    /// spacing (the wavelet passband reaches past the Nyquist rate).
    pub fn row_under_resolved(&self, i: usize) -> bool {
        self.under_resolved[i]
    }

    /// Cone-of-influence flag: true when, at scale row `i`, more than 1e-3
    /// of the wavelet envelope mass centered on column `j` overlaps the
    /// signal boundary.
    pub fn boundary_flag(&self, i: usize, j: usize) -> bool {
        let radius = COI_Z * self.scale(i) * self.wavelet.sigma_psi();
        let b = self.b(j);
        let end = self.b(self.n_translations() - 1);
        (b - self.b0) < radius || (end - b) < radius
    }
}

fn under_resolved(w: &MotherWavelet, a: f64, db: f64) -> bool {
    // Passband upper edge (sigma + 6 spectral widths) mapped through the
    // scale must stay below the sampling Nyquist rate pi/db.
    a < (w.sigma() + 6.0) * db / std::f64::consts::PI
}


fn kernel_halfwidth(w: &MotherWavelet, a: f64, db: f64) -> usize {
    (TRUNC_FACTOR * w.sigma_psi().max(1.0) * a / db).floor() as usize
}

/// Samples the wavelet for one scale row: `ker[m + M] = psi(m db / a)`,
/// conjugated when `conj` is set, times `amp`.
fn sample_kernel(w: &MotherWavelet, a: f64, db: f64, half: usize, conj: bool, amp: f64) -> Vec<Complex64> {
    let mut ker = Vec::with_capacity(2 * half + 1);
    for m in -(half as i64)..=(half as i64) {
        let mut v = w.eval(m as f64 * db / a);
        if conj {
            v = v.conj();
        }
        ker.push(v * amp);
    }
    ker
}

/// Fast-convolution transform: one FFT-based correlation per scale row.
pub fn transform(signal: &SignalSeries, w: &MotherWavelet, grid: &ScaleGrid) -> Result<CwtField> {
    let n = signal.len();
    let db = signal.dt();
    let m_max = kernel_halfwidth(w, *grid.scales().last().unwrap(), db);
    let len = (n + 2 * m_max + 1).next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    let mut sig_fft = vec![Complex64::default(); len];
    for (dst, &v) in sig_fft.iter_mut().zip(signal.values()) {
        *dst = Complex64::new(v, 0.0);
    }
    fft.process(&mut sig_fft);

    let rows: Vec<Vec<Complex64>> = grid
        .scales()
        .par_iter()
        .map(|&a| {
            let half = kernel_halfwidth(w, a, db);
            let ker = sample_kernel(w, a, db, half, true, db / a);
            let mut buf = vec![Complex64::default(); len];
            // reversed kernel turns the FFT convolution into a correlation
            for (i, &k) in ker.iter().rev().enumerate() {
                buf[i] = k;
            }
            fft.process(&mut buf);
            for (b, s) in buf.iter_mut().zip(&sig_fft) {
                *b *= s;
            }
            ifft.process(&mut buf);
            let inv = 1.0 / len as f64;
            buf[half..half + n].iter().map(|v| v * inv).collect()
        })
        .collect();

    let mut values = Array2::default((grid.len(), n));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[(i, j)] = v;
        }
    }
    CwtField::from_parts(grid.clone(), signal.t0(), db, values, *w)
}

/// Direct-quadrature transform; the reference path. Trapezoidal on the
/// zero-extended sample grid (which reduces to the plain Riemann sum), with
/// the same kernel truncation as [`transform`].
pub fn transform_direct(signal: &SignalSeries, w: &MotherWavelet, grid: &ScaleGrid) -> Result<CwtField> {
    let n = signal.len();
    let db = signal.dt();
    let f = signal.values();

    let rows: Vec<Vec<Complex64>> = grid
        .scales()
        .par_iter()
        .map(|&a| {
            let half = kernel_halfwidth(w, a, db) as i64;
            let ker = sample_kernel(w, a, db, half as usize, true, db / a);
            (0..n as i64)
                .map(|i| {
                    let lo = (-half).max(-i);
                    let hi = half.min(n as i64 - 1 - i);
                    let mut acc = Complex64::default();
                    for m in lo..=hi {
                        acc += ker[(m + half) as usize] * f[(i + m) as usize];
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let mut values = Array2::default((grid.len(), n));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[(i, j)] = v;
        }
    }
    CwtField::from_parts(grid.clone(), signal.t0(), db, values, *w)
}

/// Approximate inverse via the resolution of the identity, discretized over
/// the stored grids with log-scale weights d(ln a)/a matching the |a|^-1
/// analysis normalization. The admissibility constant is computed
/// numerically from the wavelet power spectrum as
/// C = (1/2) int |psi_hat(w)|^2 / |w| dw.
pub fn reconstruct(field: &CwtField) -> Result<SignalSeries> {
    let w = field.wavelet();
    let grid = field.grid();
    let n = field.n_translations();
    let db = field.db();

    if grid.len() < 2 {
        return Err(Error::ReconstructionCoverage(
            "need at least two scales to invert".into(),
        ));
    }
    let max_step = grid
        .scales()
        .windows(2)
        .map(|p| (p[1] / p[0]).ln())
        .fold(0.0, f64::max);
    if max_step > std::f64::consts::LN_2 / 4.0 + 1e-12 {
        return Err(Error::ReconstructionCoverage(format!(
            "scale grid too sparse: {:.2} voices per octave, need at least 4",
            std::f64::consts::LN_2 / max_step
        )));
    }

    // A band whose energy peaks on an edge row continues past the grid.
    let energies: Vec<f64> = (0..grid.len())
        .map(|i| (0..n).map(|j| field.value(i, j).norm_sqr()).sum())
        .collect();
    let e_max = energies.iter().cloned().fold(0.0, f64::max);
    if e_max > 0.0 {
        if energies[0] > 0.5 * e_max {
            return Err(Error::ReconstructionCoverage(format!(
                "signal energy concentrates at the smallest scale; the band above nu = {:.6} is not covered",
                scale_to_frequency(w, grid.scales()[0])?
            )));
        }
        if energies[grid.len() - 1] > 0.5 * e_max {
            return Err(Error::ReconstructionCoverage(format!(
                "signal energy concentrates at the largest scale; the band below nu = {:.6} is not covered",
                scale_to_frequency(w, *grid.scales().last().unwrap())?
            )));
        }
    }

    // C+ and C- from the numerically scaled spectrum.
    let ratio = spectrum_scale_factor(w)?;
    let hi = w.sigma() + 12.0;
    let seg = 64 + (2.0 * hi).ceil() as usize;
    let half_line = |sign: f64| {
        integrate(
            move |x| {
                if x == 0.0 {
                    0.0
                } else {
                    w.spectrum(sign * x).re.powi(2) / x
                }
            },
            0.0,
            hi,
            1e-10,
            seg,
        )
    };
    let c_pos = half_line(1.0)?;
    let c_neg = half_line(-1.0)?;
    let c_mean = 0.5 * (c_pos + c_neg) * ratio * ratio;
    if !c_mean.is_finite() || c_mean <= 0.0 {
        return Err(Error::Numerical("admissibility constant is not positive".into()));
    }

    // Trapezoid weights in ln a.
    let scales = grid.scales();
    let ln: Vec<f64> = scales.iter().map(|a| a.ln()).collect();
    let mut weights = vec![0.0; scales.len()];
    for i in 0..scales.len() {
        let left = if i > 0 { ln[i] - ln[i - 1] } else { 0.0 };
        let right = if i + 1 < scales.len() { ln[i + 1] - ln[i] } else { 0.0 };
        weights[i] = 0.5 * (left + right) / scales[i];
    }

    let m_max = kernel_halfwidth(w, *scales.last().unwrap(), db);
    let len = (n + 2 * m_max + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    let rows: Vec<Vec<Complex64>> = scales
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let half = kernel_halfwidth(w, a, db);
            let ker = sample_kernel(w, a, db, half, false, db);
            let mut kbuf = vec![Complex64::default(); len];
            kbuf[..ker.len()].copy_from_slice(&ker);
            fft.process(&mut kbuf);
            let mut fbuf = vec![Complex64::default(); len];
            for (dst, j) in fbuf.iter_mut().zip(0..n) {
                *dst = field.value(i, j);
            }
            fft.process(&mut fbuf);
            for (k, f) in kbuf.iter_mut().zip(&fbuf) {
                *k *= f;
            }
            ifft.process(&mut kbuf);
            let amp = weights[i] / len as f64;
            kbuf[half..half + n].iter().map(|v| v * amp).collect()
        })
        .collect();

    let mut out = vec![0.0; n];
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v.re;
        }
    }
    let inv = 1.0 / c_mean;
    for o in &mut out {
        *o *= inv;
    }
    SignalSeries::new(field.b0(), db, out)
}
