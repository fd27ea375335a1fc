//! Adaptive Dormand–Prince 5(4) integrator for complex first-order systems.
//!
//! This is the reference solver the closed forms are checked against; it knows
//! nothing about the models.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 5_000_000 }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `t0` and reports the state at each of
/// `points` (which must be non-decreasing and not precede `t0`).
pub fn integrate_to_points<F>(
    f: F,
    t0: f64,
    y0: &[Complex64],
    points: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    k[0] = f(t, &y);
    let mut h = initial_step(&y, &k[0], opts);
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(points.len());

    for &target in points {
        if target < t {
            return Err(Error::InvalidArgument("output points must be non-decreasing".into()));
        }
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepUnderflow { t });
            }
            let last = target - t <= h * (1.0 + 1e-12);
            let step = if last { target - t } else { h };
            if step <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow { t });
            }
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for (yi, ki) in ys.iter_mut().zip(kj) {
                            *yi += ki * (a * step);
                        }
                    }
                }
                k[s] = f(t + C[s] * step, &ys);
            }
            let mut y_new = y.clone();
            for (j, kj) in k.iter().enumerate().take(6) {
                let b = A[6][j];
                for (yi, ki) in y_new.iter_mut().zip(kj) {
                    *yi += ki * (b * step);
                }
            }
            let k7 = f(t + step, &y_new);
            let mut err = 0.0f64;
            for i in 0..n {
                let mut e = k7[i] * E[6];
                for (j, kj) in k.iter().enumerate().take(6) {
                    e += kj[i] * E[j];
                }
                let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max((e * step).norm() / scale);
            }
            steps += 1;
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k[0] = k7;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let proposed = step * factor;
            if err <= 1.0 && last {
                // keep the free-running step size; the last step was clipped
                h = h.max(proposed);
            } else {
                h = proposed;
            }
            if !h.is_finite() || h <= 0.0 {
                return Err(Error::StepUnderflow { t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// State at `t_end` only.
pub fn integrate<F>(f: F, t0: f64, y0: &[Complex64], t_end: f64, opts: OdeOptions) -> Result<Vec<Complex64>>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    Ok(integrate_to_points(f, t0, y0, &[t_end], opts)?.pop().expect("one output point"))
}

fn initial_step(y: &[Complex64], dy: &[Complex64], opts: OdeOptions) -> f64 {
    let scale = |i: usize| opts.atol + opts.rtol * y[i].norm();
    let d0 = (0..y.len()).map(|i| y[i].norm() / scale(i)).fold(0.0, f64::max);
    let d1 = (0..y.len()).map(|i| dy[i].norm() / scale(i)).fold(0.0, f64::max);
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(1e-10, 0.1)
}
