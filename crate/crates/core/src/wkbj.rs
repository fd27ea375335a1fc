//! WKBJ approximation for `psi'' + alpha(x)^2 psi = 0` from the adiabatic propagator.
//!
//! With `phi = psi'` the equation becomes `i d/dx (psi, phi) = L(x) (psi, phi)`,
//! `L = [[0, i], [-i alpha^2, 0]]`, whose eigenvalues are `+-alpha`. `L` is not
//! Hermitian, so the propagator is assembled from explicit right eigenvectors
//! and their biorthogonal left partners. Both Berry connections vanish and the
//! adiabatic propagator is exactly the WKBJ solution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Operator, I};
use crate::numerics::derivative;
use crate::ode::{integrate_to_points, OdeOptions};

/// Simpson intervals per unit length used for the phase integral.
const PHASE_DENSITY: f64 = 400.0;
const MIN_PHASE_INTERVALS: usize = 64;

pub struct WkbjProblem<F: Fn(f64) -> f64> {
    pub alpha: F,
    pub x0: f64,
    pub x1: f64,
    pub psi0: Complex64,
    pub phi0: Complex64,
}

impl<F: Fn(f64) -> f64> WkbjProblem<F> {
    pub fn new(alpha: F, x0: f64, x1: f64, psi0: Complex64, phi0: Complex64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && x1 > x0) {
            return Err(Error::InvalidArgument(format!("need x0 < x1, got [{x0}, {x1}]")));
        }
        Ok(Self { alpha, x0, x1, psi0, phi0 })
    }

    fn alpha_checked(&self, x: f64) -> Result<f64> {
        let a = (self.alpha)(x);
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::TurningPoint { x });
        }
        Ok(a)
    }

    fn check_range(&self, x: f64) -> Result<()> {
        if x < self.x0 || x > self.x1 {
            return Err(Error::InvalidArgument(format!("x = {x} outside [{}, {}]", self.x0, self.x1)));
        }
        Ok(())
    }

    /// `S(x) = int_{x0}^{x} alpha` by composite Simpson; fails at a turning point.
    pub fn phase_integral(&self, x: f64) -> Result<f64> {
        self.check_range(x)?;
        let len = x - self.x0;
        let mut n = ((len * PHASE_DENSITY).ceil() as usize).max(MIN_PHASE_INTERVALS);
        n += n % 2;
        let h = len / n as f64;
        let mut sum = self.alpha_checked(self.x0)? + self.alpha_checked(x)?;
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * self.alpha_checked(self.x0 + k as f64 * h)?;
        }
        Ok(sum * h / 3.0)
    }

    /// WKBJ constants `C1 = sqrt(alpha0) psi0`, `C2 = phi0 / sqrt(alpha0)`.
    pub fn constants(&self) -> Result<(Complex64, Complex64)> {
        let a0 = self.alpha_checked(self.x0)?.sqrt();
        Ok((self.psi0 * a0, self.phi0 / a0))
    }
}

/// `L(x)`.
pub fn wkbj_generator(alpha: f64) -> Operator {
    let zero = Complex64::new(0.0, 0.0);
    Operator::from_rows(&[[zero, I], [-I * (alpha * alpha), zero]])
}

/// Right eigenvectors of `L` for `+alpha` and `-alpha`, normalised so that
/// the matching left vectors give unit pairing (principal square roots).
fn right_vectors(alpha: f64) -> [[Complex64; 2]; 2] {
    let np = (-2.0 * I * alpha).sqrt();
    let nm = (2.0 * I * alpha).sqrt();
    [[1.0 / np, -I * alpha / np], [1.0 / nm, I * alpha / nm]]
}

fn left_vectors(alpha: f64) -> [[Complex64; 2]; 2] {
    let np = (-2.0 * I * alpha).sqrt();
    let nm = (2.0 * I * alpha).sqrt();
    [[-I * alpha / np, 1.0 / np], [I * alpha / nm, 1.0 / nm]]
}

/// `(C1 cos S + C2 sin S) / sqrt(alpha(x))`.
pub fn wkbj_closed<F: Fn(f64) -> f64>(problem: &WkbjProblem<F>, x: f64) -> Result<Complex64> {
    let s = problem.phase_integral(x)?;
    let (c1, c2) = problem.constants()?;
    Ok((c1 * s.cos() + c2 * s.sin()) / problem.alpha_checked(x)?.sqrt())
}

/// Adiabatic propagator `sum_n e^{-i int E_n} |n,x> <n~,x0|` of the first-order system.
pub fn wkbj_matrix_propagator<F: Fn(f64) -> f64>(problem: &WkbjProblem<F>, x: f64) -> Result<Operator> {
    let s = problem.phase_integral(x)?;
    let right = right_vectors(problem.alpha_checked(x)?);
    let left = left_vectors(problem.alpha_checked(problem.x0)?);
    let phases = [Complex64::from_polar(1.0, -s), Complex64::from_polar(1.0, s)];
    let mut u = Operator::zeros(2);
    for n in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                u[(i, j)] += phases[n] * right[n][i] * left[n][j];
            }
        }
    }
    Ok(u)
}

/// `(psi, phi)` at `x` from adaptive integration of `psi'' = -alpha^2 psi`.
pub fn reference_solve<F: Fn(f64) -> f64>(problem: &WkbjProblem<F>, x: f64, tol: f64) -> Result<(Complex64, Complex64)> {
    let out = reference_solve_points(problem, &[x], tol)?;
    Ok(out[0])
}

pub fn reference_solve_points<F: Fn(f64) -> f64>(
    problem: &WkbjProblem<F>,
    xs: &[f64],
    tol: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    if tol.is_nan() || tol < 1e-12 {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 1e-12, got {tol}")));
    }
    for &x in xs {
        problem.check_range(x)?;
    }
    let f = |x: f64, y: &[Complex64]| {
        let a = (problem.alpha)(x);
        vec![y[1], -y[0] * (a * a)]
    };
    let states = integrate_to_points(f, problem.x0, &[problem.psi0, problem.phi0], xs, OdeOptions::with_tol(tol))?;
    Ok(states.into_iter().map(|y| (y[0], y[1])).collect())
}

/// `max |psi_WKBJ - psi_ref| / max |psi_ref|` over `samples` equally spaced points.
pub fn wkbj_relative_error<F: Fn(f64) -> f64>(problem: &WkbjProblem<F>, samples: usize, tol: f64) -> Result<f64> {
    let n = samples.max(2);
    let xs: Vec<f64> = (0..n).map(|k| problem.x0 + (problem.x1 - problem.x0) * k as f64 / (n - 1) as f64).collect();
    let reference = reference_solve_points(problem, &xs, tol)?;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (x, (psi, _)) in xs.iter().zip(&reference) {
        worst = worst.max((wkbj_closed(problem, *x)? - psi).norm());
        scale = scale.max(psi.norm());
    }
    Ok(worst / scale)
}

/// Biorthogonal Berry connections `<n~,x| i d/dx |n,x>` for both branches,
/// from finite differences of the right eigenvectors on `samples` points.
pub fn wkbj_berry_connections<F: Fn(f64) -> f64>(problem: &WkbjProblem<F>, samples: usize) -> Result<Vec<[Complex64; 2]>> {
    let n = samples.max(5);
    let h = (problem.x1 - problem.x0) / (n - 1) as f64;
    let alphas: Vec<f64> = (0..n).map(|k| problem.alpha_checked(problem.x0 + k as f64 * h)).collect::<Result<_>>()?;
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; n];
    for branch in 0..2 {
        for comp in 0..2 {
            let path: Vec<Complex64> = alphas.iter().map(|&a| right_vectors(a)[branch][comp]).collect();
            let d = derivative(&path, h);
            for (k, dk) in d.iter().enumerate() {
                out[k][branch] += I * left_vectors(alphas[k])[branch][comp] * dk;
            }
        }
    }
    Ok(out)
}
