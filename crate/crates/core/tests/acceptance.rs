//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured values and asserting the stated tolerance and runtime
//! budget. Criterion 11 (CLI byte determinism) lives in the CLI crate's
//! test suite.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use ridgeline::*;

fn report(name: &str, pass: bool, detail: &str) {
    println!("{name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn check_runtime(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{name}: runtime {elapsed:?} exceeds budget {budget:?}"
    );
}

fn new_wavelet(sigma: f64) -> MotherWavelet {
    MotherWavelet::new(WaveletKind::NewWavelet, sigma).unwrap()
}

fn sampled(f: impl Fn(f64) -> f64, t0: f64, t1: f64, dt: f64) -> SignalSeries {
    let n = ((t1 - t0) / dt).round() as usize + 1;
    SignalSeries::new(t0, dt, (0..n).map(|i| f(t0 + i as f64 * dt)).collect()).unwrap()
}

#[test]
fn acceptance_01_admissibility_and_normalization() {
    let started = Instant::now();
    let mut worst_adm = 0.0f64;
    let mut worst_norm = 0.0f64;
    let mut worst_split = 0.0f64;
    for sigma in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let w = new_wavelet(sigma);
        let at_zero = spectrum_fourier(&w, 0.0).unwrap().norm();
        let peak = spectrum_fourier(&w, mode_freq_numeric(&w)).unwrap().norm();
        worst_adm = worst_adm.max(at_zero / peak);

        let seg = 64 + (8.0 * sigma) as usize;
        let quad = |f: &dyn Fn(f64) -> f64| {
            ridgeline_test_integrate(f, -12.0, 12.0, seg)
        };
        let re2 = quad(&|t| w.eval(t).re.powi(2));
        let im2 = quad(&|t| w.eval(t).im.powi(2));
        worst_norm = worst_norm.max((re2 + im2 - 1.0).abs());
        worst_split = worst_split.max((re2 - 0.5).abs()).max((im2 - 0.5).abs());
    }
    let pass = worst_adm < 1e-10 && worst_norm <= 1e-9 && worst_split <= 1e-9;
    let detail = format!(
        "max |psihat(0)|/peak = {worst_adm:.2e}, max |norm-1| = {worst_norm:.2e}, max |half-0.5| = {worst_split:.2e}"
    );
    report("acceptance 01 admissibility & normalization", pass, &detail);
    check_runtime("01", started, Duration::from_secs(10));
    assert!(pass, "{detail}");
}

// trapezoid rule fine enough for 1e-10 on these integrands; independent of
// the library's own quadrature
fn ridgeline_test_integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, seg_hint: usize) -> f64 {
    let n = (200_000 * (1 + seg_hint / 64)).min(1_200_000);
    let h = (b - a) / n as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..n {
        acc += f(a + i as f64 * h);
    }
    acc * h
}

#[test]
fn acceptance_02_morlet_bimodality_threshold() {
    let started = Instant::now();
    let count = |sigma: f64| modality_count(&MotherWavelet::new(WaveletKind::Morlet, sigma).unwrap());
    let mut lo = 1.5;
    let mut hi = 2.2;
    assert_eq!(count(lo), 2);
    assert_eq!(count(hi), 1);
    while hi - lo > 0.002 {
        let mid = 0.5 * (lo + hi);
        if count(mid) >= 2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = 0.5 * (lo + hi);
    let thr_ok = (threshold - 1.798).abs() <= 0.01;

    let mut mono = true;
    let mut sigma = 0.05;
    while sigma <= 10.0 + 1e-9 {
        if modality_count(&new_wavelet(sigma)) != 1 {
            mono = false;
            break;
        }
        sigma += 0.05;
    }
    let pass = thr_ok && mono;
    let detail = format!(
        "Morlet mono/bi transition at sigma = {threshold:.4} (expect 1.798 +- 0.01); NewWavelet mono-modal over [0.05, 10]: {mono}"
    );
    report("acceptance 02 Morlet bimodality threshold", pass, &detail);
    check_runtime("02", started, Duration::from_secs(30));
    assert!(pass, "{detail}");
}

#[test]
fn acceptance_03_mexican_hat_limit() {
    let started = Instant::now();
    let w = new_wavelet(1e-4);
    let c = (2.0f64 / 3.0).sqrt() * std::f64::consts::PI.powf(-0.25);
    let mut sup = 0.0f64;
    for i in 0..=12_000 {
        let t = -6.0 + i as f64 * 1e-3;
        let expect = c * (-0.5 * t * t).exp() * (t * t - 1.0);
        sup = sup.max((w.eval(t).re - expect).abs());
    }
    let pass = sup < 1e-3;
    let detail = format!("sup-norm deviation {sup:.2e} over t in [-6, 6]");
    report("acceptance 03 Mexican-Hat limit", pass, &detail);
    check_runtime("03", started, Duration::from_secs(1));
    assert!(pass, "{detail}");
}

#[test]
fn acceptance_04_mean_frequency_asymptote() {
    let started = Instant::now();
    let w10 = new_wavelet(10.0);
    let at_ten = (w10.mean_freq() / 10.0 - 1.0).abs();
    let mut worst_ratio = 0.0f64;
    for sigma in [0.5, 1.0, 2.0, 3.0, 5.0, 10.0] {
        let w = new_wavelet(sigma);
        let ratio = (w.mean_freq() / mode_freq_numeric(&w) - 1.0).abs();
        worst_ratio = worst_ratio.max(ratio);
    }
    let pass = at_ten < 0.01 && worst_ratio <= 0.05;
    let detail = format!(
        "|mean(10)/10 - 1| = {at_ten:.2e}; max |mean/mode - 1| over sigma >= 0.5: {:.3}",
        worst_ratio
    );
    report("acceptance 04 mean-frequency asymptote", pass, &detail);
    check_runtime("04", started, Duration::from_secs(30));
    assert!(pass, "{detail}");
}

/// One extracted point of the chirp pipeline.
#[derive(Debug, Clone, Copy)]
struct TrackPoint {
    b: f64,
    a_r: f64,
    modulus: f64,
    amplitude: f64,
    nu_mod: f64,
    nu_phase: f64,
}

struct ChirpRun {
    new_points: Vec<TrackPoint>,
    morlet_points: Vec<TrackPoint>,
    new_env_variance: f64,
    compute_time: Duration,
}

fn window_points(field: &CwtField, w: &MotherWavelet) -> Vec<TrackPoint> {
    let ridges = link_ridges(field, &RidgeConfig::default());
    let max_weight = ridges.iter().map(Ridge::weight).fold(0.0, f64::max);
    let mut by_b: std::collections::BTreeMap<u64, TrackPoint> = Default::default();
    for ridge in ridges.iter().filter(|r| r.weight() >= 0.1 * max_weight) {
        let track = component_track(ridge, field, w).unwrap();
        for (i, p) in ridge.points.iter().enumerate() {
            if p.boundary_flag || p.b.abs() < 3.0 || p.b.abs() > 8.0 {
                continue;
            }
            let tp = TrackPoint {
                b: p.b,
                a_r: p.a_r,
                modulus: p.modulus,
                amplitude: track.amplitude[i],
                nu_mod: track.freq_mod[i],
                nu_phase: track.freq_phase[i],
            };
            by_b
                .entry(p.b.to_bits())
                .and_modify(|old| {
                    if tp.modulus > old.modulus {
                        *old = tp;
                    }
                })
                .or_insert(tp);
        }
    }
    by_b.into_values().collect()
}

fn chirp_run() -> &'static ChirpRun {
    static RUN: OnceLock<ChirpRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let started = Instant::now();
        let sig = synth(&SyntheticSpec {
            kind: SyntheticKind::Chirp,
            t_min: -10.0,
            t_max: 10.0,
            dt: 0.005,
        })
        .unwrap();
        let wn = new_wavelet(1.0);
        let gn = ScaleGrid::log_spaced(&wn, 0.15, 4.0, 16).unwrap();
        let fnw = transform(&sig, &wn, &gn).unwrap();
        let new_points = window_points(&fnw, &wn);

        let wm = MotherWavelet::new(WaveletKind::Morlet, 1.0).unwrap();
        let gm = ScaleGrid::log_spaced(&wm, 0.15, 4.0, 16).unwrap();
        let fm = transform(&sig, &wm, &gm).unwrap();
        let morlet_points = window_points(&fm, &wm);

        ChirpRun {
            new_points,
            morlet_points,
            new_env_variance: wn.env_variance(),
            compute_time: started.elapsed(),
        }
    })
}

fn freq_errors(points: &[TrackPoint], pick: impl Fn(&TrackPoint) -> f64) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut sum_sq = 0.0;
    for p in points {
        let expect = p.b.abs() / std::f64::consts::PI;
        let e = (pick(p) / expect - 1.0).abs();
        max = max.max(e);
        sum_sq += e * e;
    }
    (max, (sum_sq / points.len() as f64).sqrt())
}

// Criteria 05 and 06 encode optimistic tolerances that the method does not
// attain at sigma = 1, and they fail with the measured values printed.
//
// The reason is structural, not an implementation defect (the transform and
// ridge layers are validated against independent dense-grid quadrature
// oracles elsewhere in this suite): at sigma = 1 the equal-split wavelet
// carries a ~26% anti-analytic amplitude fraction ((p - q)/2 relative to
// (p + q)/2), and for a real chirp the conjugate component is only
// Fresnel-suppressed by a factor that is independent of |t|, so it beats
// against the analytic component along the entire ridge. Measured effects:
// the scale-ridge position wobbles by up to ~20% in frequency (the ridge
// cross-section is very flat in log-scale at sigma = 1), the nearest-node
// phase estimator spikes to ~30%, and the Gaussian-envelope amplitude
// calibration reads ~0.93 on a unit-amplitude component (the wavelet's
// time-bandwidth product at sigma = 1 is ~1.9x the Gaussian bound, so the
// on-ridge modulus is ~7% below the Gaussian-envelope prediction the
// amplitude formula inverts). The same pipeline meets the stated numbers
// comfortably at sigma >= 3 (see criterion 08 and the tone tests).
#[test]
fn acceptance_05_chirp_frequency_law() {
    let started = Instant::now();
    let run = chirp_run();
    // full coverage of the 3 <= |t| <= 8 window (2 x 1001 samples)
    assert!(run.new_points.len() >= 1980, "window coverage {}", run.new_points.len());

    let (new_mod_max, new_mod_rms) = freq_errors(&run.new_points, |p| p.nu_mod);
    let (new_ph_max, new_ph_rms) = freq_errors(&run.new_points, |p| p.nu_phase);
    let (_, mor_mod_rms) = freq_errors(&run.morlet_points, |p| p.nu_mod);
    let (_, mor_ph_rms) = freq_errors(&run.morlet_points, |p| p.nu_phase);

    let mut failures = Vec::new();
    if new_mod_max > 0.05 {
        failures.push(format!("scale-estimator max deviation {:.1}% > 5%", new_mod_max * 100.0));
    }
    if new_ph_max > 0.05 {
        failures.push(format!("phase-estimator max deviation {:.1}% > 5%", new_ph_max * 100.0));
    }
    if new_mod_rms >= mor_mod_rms {
        failures.push(format!(
            "scale-estimator RMS not below Morlet: {:.2}% vs {:.2}%",
            new_mod_rms * 100.0,
            mor_mod_rms * 100.0
        ));
    }
    if new_ph_rms >= mor_ph_rms {
        failures.push(format!(
            "phase-estimator RMS not below Morlet: {:.2}% vs {:.2}%",
            new_ph_rms * 100.0,
            mor_ph_rms * 100.0
        ));
    }
    let pass = failures.is_empty();
    let detail = format!(
        "new: mod max/rms {:.1}%/{:.1}%, phase max/rms {:.1}%/{:.1}%; morlet rms mod/phase {:.1}%/{:.1}%{}",
        new_mod_max * 100.0,
        new_mod_rms * 100.0,
        new_ph_max * 100.0,
        new_ph_rms * 100.0,
        mor_mod_rms * 100.0,
        mor_ph_rms * 100.0,
        if pass { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    report("acceptance 05 chirp frequency law", pass, &detail);
    check_runtime("05", started, Duration::from_secs(120));
    assert!(pass, "{detail}");
}

#[test]
fn acceptance_06_chirp_amplitude() {
    let started = Instant::now();
    let run = chirp_run();
    let lo = run.new_points.iter().map(|p| p.amplitude).fold(f64::MAX, f64::min);
    let hi = run.new_points.iter().map(|p| p.amplitude).fold(f64::MIN, f64::max);
    let mean = run.new_points.iter().map(|p| p.amplitude).sum::<f64>() / run.new_points.len() as f64;
    let pass = lo >= 0.95 && hi <= 1.05;
    let detail = format!(
        "amplitude on 3<=|t|<=8: [{lo:.4}, {hi:.4}], mean {mean:.4}; required 1.0 +- 5%"
    );
    report("acceptance 06 chirp amplitude", pass, &detail);
    check_runtime(
        "06",
        started,
        Duration::from_secs(120) + run.compute_time,
    );
    assert!(pass, "{detail}");
}

#[test]
fn acceptance_07_stationary_phase_oracle() {
    let started = Instant::now();
    let run = chirp_run();
    let w = new_wavelet(1.0);
    let s2 = run.new_env_variance;
    let mut worst = 0.0f64;
    let mut used = 0;
    for p in &run.new_points {
        // |Phi''| a^2 sigma_psi^2 < 0.1 with Phi'' = 2 for sin(t^2)
        if 2.0 * p.a_r * p.a_r * s2 >= 0.1 {
            continue;
        }
        used += 1;
        let model = SignalModel {
            amplitude: 1.0,
            phase: p.b * p.b - 0.5 * std::f64::consts::PI,
            phase_rate: 2.0 * p.b.abs(),
            phase_curvature: 2.0,
        };
        let predicted = stationary_phase_modulus(&w, p.a_r, p.b, &model, p.b, true);
        worst = worst.max((p.modulus / predicted - 1.0).abs());
    }
    let pass = used > 100 && worst < 0.10;
    let detail =
        format!("max |computed/predicted - 1| = {:.1}% over {used} on-ridge points", worst * 100.0);
    report("acceptance 07 stationary-phase oracle", pass, &detail);
    check_runtime("07", started, Duration::from_secs(60) + run.compute_time);
    assert!(pass, "{detail}");
}

#[test]
fn acceptance_08_synthetic_rrdf_recovery() {
    let started = Instant::now();
    let d = synth(&SyntheticSpec {
        kind: SyntheticKind::DampedOscillation { alpha: 31.8, beta: 0.350, nu: 1.08 },
        t_min: 0.005,
        t_max: 25.0,
        dt: 0.005,
    })
    .unwrap();

    // frequency from the sigma = 3 transform
    let w3 = new_wavelet(3.0);
    let g3 = ScaleGrid::log_spaced(&w3, 0.4, 3.0, 16).unwrap();
    let f3 = transform(&d, &w3, &g3).unwrap();
    let ridges = link_ridges(&f3, &RidgeConfig::default());
    let dominant = ridges
        .iter()
        .max_by(|a, b| a.weight().partial_cmp(&b.weight()).unwrap())
        .expect("no ridge found");
    let freq: Vec<(f64, f64)> = freq_from_scale(dominant, &w3)
        .into_iter()
        .zip(&dominant.points)
        .filter(|(_, p)| !p.boundary_flag)
        .map(|(v, _)| v)
        .collect();
    let nu_fit = fit_constant(&freq, (5.0, 18.0)).unwrap();
    let nu = nu_fit.param("value").unwrap();

    // amplitude decay from the sigma = 2 transform
    let w2 = new_wavelet(2.0);
    let g2 = ScaleGrid::log_spaced(&w2, 0.4, 3.0, 16).unwrap();
    let f2 = transform(&d, &w2, &g2).unwrap();
    let ridges2 = link_ridges(&f2, &RidgeConfig::default());
    let dominant2 = ridges2
        .iter()
        .max_by(|a, b| a.weight().partial_cmp(&b.weight()).unwrap())
        .expect("no ridge found");
    let amp: Vec<(f64, f64)> = amplitude_track(dominant2, &w2)
        .into_iter()
        .zip(&dominant2.points)
        .filter(|(_, p)| !p.boundary_flag)
        .map(|(v, _)| v)
        .collect();
    let exp_fit = fit_exponential(&amp, (5.0, 18.0)).unwrap();
    let beta = exp_fit.param("beta").unwrap();

    let ps = power_spectrum(&d);
    let peak = ps.iter().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap().0;

    let nu_ok = (nu / 1.08 - 1.0).abs() <= 0.01;
    let beta_ok = (beta / 0.350 - 1.0).abs() <= 0.03;
    let peak_ok = (peak - 1.08).abs() <= 0.01;
    let pass = nu_ok && beta_ok && peak_ok;
    let detail = format!(
        "nu = {nu:.4} (1.08 +- 1%), beta = {beta:.4} (0.350 +- 3%), spectrum peak = {peak:.4} (1.08 +- 0.01)"
    );
    report("acceptance 08 synthetic RRDF recovery", pass, &detail);
    check_runtime("08", started, Duration::from_secs(120));
    assert!(pass, "{detail}");
}

#[test]
fn acceptance_09_transform_path_equivalence() {
    let started = Instant::now();
    let mut worst = 0.0f64;

    let w5 = new_wavelet(5.0);
    let tone = sampled(|t| (5.0 * t).cos(), -20.0, 20.0, 0.005);
    let g = ScaleGrid::log_spaced(&w5, 0.4, 1.6, 16).unwrap();
    let fa = transform(&tone, &w5, &g).unwrap();
    let fb = transform_direct(&tone, &w5, &g).unwrap();
    worst = worst.max(path_deviation(&fa, &fb));

    let w1 = new_wavelet(1.0);
    let chirp = synth(&SyntheticSpec {
        kind: SyntheticKind::Chirp,
        t_min: -10.0,
        t_max: 10.0,
        dt: 0.005,
    })
    .unwrap();
    let g1 = ScaleGrid::log_spaced(&w1, 0.15, 4.0, 16).unwrap();
    let ca = transform(&chirp, &w1, &g1).unwrap();
    let cb = transform_direct(&chirp, &w1, &g1).unwrap();
    worst = worst.max(path_deviation(&ca, &cb));

    let pass = worst <= 1e-8;
    let detail = format!("max interior |direct - fft| / max|F| = {worst:.2e}");
    report("acceptance 09 transform path equivalence", pass, &detail);
    check_runtime("09", started, Duration::from_secs(60));
    assert!(pass, "{detail}");
}

fn path_deviation(fa: &CwtField, fb: &CwtField) -> f64 {
    let peak = fa.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..fa.n_scales() {
        for j in 0..fa.n_translations() {
            if fa.boundary_flag(i, j) {
                continue;
            }
            worst = worst.max((fa.value(i, j) - fb.value(i, j)).norm());
        }
    }
    worst / peak
}

#[test]
fn acceptance_10_reconstruction_round_trip() {
    let started = Instant::now();
    let w = new_wavelet(5.0);
    let tone = sampled(|t| (5.0 * t).cos(), -20.0, 20.0, 0.005);
    let nu0 = 5.0 / (2.0 * std::f64::consts::PI);
    let grid = ScaleGrid::log_spaced(&w, nu0 / 2.0, nu0 * 2.0, 32).unwrap();
    let field = transform(&tone, &w, &grid).unwrap();
    let rec = reconstruct(&field).unwrap();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (&r, &s)) in rec.values().iter().zip(tone.values()).enumerate() {
        if tone.coord(i).abs() <= 10.0 {
            num += (r - s) * (r - s);
            den += s * s;
        }
    }
    let rel = (num / den).sqrt();
    let pass = rel < 0.05;
    let detail = format!(
        "relative L2 error {:.3}% on the interior half ({} scales)",
        rel * 100.0,
        grid.len()
    );
    report("acceptance 10 reconstruction round trip", pass, &detail);
    check_runtime("10", started, Duration::from_secs(60));
    assert!(pass, "{detail}");
}
