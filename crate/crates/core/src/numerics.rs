//! Shared numerical routines: adaptive quadrature, 1-d maximization and
//! phase utilities.

use crate::error::{Error, Result};

/// Composite Simpson quadrature of `f` over `[a, b]` with node doubling
/// until two successive refinements agree to `rel_tol`.
///
/// `segments` seeds the initial node count so oscillatory integrands start
/// dense enough. Convergence is judged against the larger of the integral
/// magnitude and a small fraction of the L1 mass, so strongly cancelling
/// integrals (true value near zero) still terminate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    segments: usize,
) -> Result<f64> {
    let n0 = segments.max(64).next_power_of_two();
    let h0 = (b - a) / n0 as f64;

    let va = f(a);
    let vb = f(b);
    let mut trap_sum = 0.5 * (va + vb);
    let mut mass_sum = 0.5 * (va.abs() + vb.abs());
    for i in 1..n0 {
        let v = f(a + i as f64 * h0);
        trap_sum += v;
        mass_sum += v.abs();
    }
    let mut trap = trap_sum * h0;
    let mut mass = mass_sum * h0;
    let mut h = h0;
    let mut n = n0;
    let mut prev = f64::NAN;

    for _ in 0..22 {
        let mut mid_sum = 0.0;
        let mut mid_mass = 0.0;
        for i in 0..n {
            let v = f(a + (i as f64 + 0.5) * h);
            mid_sum += v;
            mid_mass += v.abs();
        }
        let trap2 = 0.5 * trap + 0.5 * h * mid_sum;
        mass = 0.5 * mass + 0.5 * h * mid_mass;
        let simpson = (4.0 * trap2 - trap) / 3.0;
        if !simpson.is_finite() {
            return Err(Error::Numerical("quadrature produced a non-finite value".into()));
        }
        if prev.is_finite() {
            // the 1e-14 * mass term is the rounding floor of the node sums;
            // a cancelling integral cannot be resolved below it
            if (simpson - prev).abs() <= rel_tol * simpson.abs() + 1e-14 * mass {
                return Ok(simpson);
            }
        }
        prev = simpson;
        trap = trap2;
        h *= 0.5;
        n *= 2;
    }
    Err(Error::Numerical(format!(
        "quadrature did not converge on [{a}, {b}] after {n} nodes"
    )))
}

/// Golden-section maximization of `f` on `[lo, hi]` to absolute tolerance
/// `tol` in the argument. `f` must be unimodal on the bracket.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Vertex of the parabola through `(x0-h, y0)`, `(x0, y1)`, `(x0+h, y2)`.
/// Returns `(x*, y*)`; the caller guarantees `y1` is a strict maximum so the
/// denominator is negative.
pub fn parabola_vertex(x0: f64, h: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let den = y0 - 2.0 * y1 + y2;
    if den == 0.0 {
        return (x0, y1);
    }
    let d = 0.5 * (y0 - y2) / den;
    (x0 + d * h, y1 - 0.125 * (y0 - y2) * (y0 - y2) / den)
}

/// Unwrap a phase sequence in place: jumps larger than pi between
/// consecutive samples are corrected by multiples of 2*pi.
pub fn unwrap_phase(phase: &mut [f64]) {
    let mut correction = 0.0;
    for i in 1..phase.len() {
        let raw = phase[i];
        let prev = phase[i - 1];
        let mut diff = raw + correction - prev;
        while diff > std::f64::consts::PI {
            correction -= 2.0 * std::f64::consts::PI;
            diff -= 2.0 * std::f64::consts::PI;
        }
        while diff < -std::f64::consts::PI {
            correction += 2.0 * std::f64::consts::PI;
            diff += 2.0 * std::f64::consts::PI;
        }
        phase[i] = raw + correction;
    }
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// sinh(x)/x with the removable singularity filled in.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}
