//! Two-level atom in a strong monochromatic field.
//!
//! Vectors are ordered `(|2>, |1>)` with `|2>` the upper level, so the free
//! Hamiltonian is `(omega0/2) sigma_3` and the dipole operator is
//! `-d sigma_1`. The field amplitude is constant (instant switch-on).
//!
//! The strong-field expansion treats the coupling exactly through the dressed
//! states and the level splitting `omega0` perturbatively. Its first-order
//! state leads to a closed-form dipole signal whose spectrum holds the odd
//! harmonics of the laser and the hyper-Raman lines `omega0R +- 2n omegaL`,
//! with `omega0R = omega0 J_0(z)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::{bessel_j, bessel_sequence, truncation_order};
use crate::engine::TimeGrid;
use crate::error::{Error, Result};
use crate::linalg::{sigma, unitary_exponential, Operator, StateVector, I};
use crate::spectrum::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HhgParams {
    pub omega0: f64,
    pub omega_l: f64,
    pub field: f64,
    pub dipole: f64,
}

impl HhgParams {
    pub fn new(omega0: f64, omega_l: f64, field: f64, dipole: f64) -> Result<Self> {
        if !(omega_l > 0.0 && omega_l.is_finite()) {
            return Err(Error::InvalidArgument(format!("laser frequency must be positive, got {omega_l}")));
        }
        if !(omega0.is_finite() && field.is_finite() && dipole.is_finite()) {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        Ok(Self { omega0, omega_l, field, dipole })
    }

    /// Parameters for a given Bessel argument `z = 2 field dipole / omegaL`.
    pub fn from_z(omega0: f64, omega_l: f64, z: f64, dipole: f64) -> Result<Self> {
        if dipole == 0.0 {
            return Err(Error::InvalidArgument("dipole must be non-zero to fix z".into()));
        }
        Self::new(omega0, omega_l, z * omega_l / (2.0 * dipole), dipole)
    }

    /// Coupling amplitude `field * dipole`.
    pub fn coupling(&self) -> f64 {
        self.field * self.dipole
    }

    pub fn z_half(&self) -> f64 {
        self.coupling() / self.omega_l
    }

    pub fn z(&self) -> f64 {
        2.0 * self.z_half()
    }

    pub fn omega0_r(&self) -> f64 {
        renormalized_gap(self)
    }
}

/// Initial amplitudes of the bare levels `|1>` (lower) and `|2>` (upper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Populations {
    /// Normalises `(c1, c2)`; fails for the zero vector.
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let n = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("initial amplitudes must not vanish".into()));
        }
        Ok(Self { c1: c1 / n, c2: c2 / n })
    }

    pub fn ground() -> Self {
        Self { c1: Complex64::new(1.0, 0.0), c2: Complex64::new(0.0, 0.0) }
    }

    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { c1: Complex64::new(h, 0.0), c2: Complex64::new(h, 0.0) }
    }

    /// State vector in the `(|2>, |1>)` order.
    pub fn to_state(&self) -> StateVector {
        StateVector::new(vec![self.c2, self.c1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    /// Free evolution `e^{-i omega0 sigma_3 t / 2}` included (states in the lab frame).
    #[default]
    Schrodinger,
    Interaction,
}

pub fn hhg_interaction_hamiltonian(p: &HhgParams, t: f64) -> Operator {
    let a = p.coupling() * (p.omega_l * t).cos();
    let zero = Complex64::new(0.0, 0.0);
    Operator::from_rows(&[
        [zero, Complex64::from_polar(1.0, p.omega0 * t) * a],
        [Complex64::from_polar(1.0, -p.omega0 * t) * a, zero],
    ])
}

/// `(|a,t>, |b,t>)` for eigenvalues `-Ωd cos(ωL t)` and `+Ωd cos(ωL t)`.
pub fn hhg_dressed_states(p: &HhgParams, t: f64) -> (StateVector, StateVector) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = StateVector::new(vec![Complex64::new(h, 0.0), -Complex64::from_polar(h, -p.omega0 * t)]);
    let b = StateVector::new(vec![Complex64::from_polar(h, p.omega0 * t), Complex64::new(h, 0.0)]);
    (a, b)
}

/// `(<a| i d/dt |a>, <b| i d/dt |b>) = (omega0/2, -omega0/2)`.
pub fn hhg_berry_connections(p: &HhgParams) -> (f64, f64) {
    (p.omega0 / 2.0, -p.omega0 / 2.0)
}

/// `e^{-i sigma_1 theta}`.
fn sigma1_rotation(theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    Operator::from_rows(&[[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]])
}

/// `e^{i sigma_3 theta}`.
fn sigma3_phase(theta: f64) -> Operator {
    let zero = Complex64::new(0.0, 0.0);
    Operator::from_rows(&[[Complex64::from_polar(1.0, theta), zero], [zero, Complex64::from_polar(1.0, -theta)]])
}

/// Leading strong-field propagator.
///
/// Interaction picture: `e^{i (omega0/2) sigma_3 t} e^{-i sigma_1 z_half sin(omegaL t)}`;
/// Schrodinger picture drops the first factor.
pub fn hhg_leading_propagator(p: &HhgParams, t: f64, picture: Picture) -> Operator {
    let rot = sigma1_rotation(p.z_half() * (p.omega_l * t).sin());
    match picture {
        Picture::Schrodinger => rot,
        Picture::Interaction => &sigma3_phase(p.omega0 * t / 2.0) * &rot,
    }
}

/// `(omega0/2) e^{i sigma_1 s} sigma_3 e^{-i sigma_1 s}`, `s = z_half sin(omegaL t)`.
pub fn hhg_dual_hamiltonian(p: &HhgParams, t: f64) -> Operator {
    let s = p.z_half() * (p.omega_l * t).sin();
    let (sn, cs) = (2.0 * s).sin_cos();
    (sigma(3) * cs + sigma(2) * sn) * (p.omega0 / 2.0)
}

pub fn renormalized_gap(p: &HhgParams) -> f64 {
    // z is far below any order limit, J_0 cannot fail
    p.omega0 * bessel_j(0, p.z()).expect("order 0 is always supported")
}

/// Max-norm error of the truncated Jacobi–Anger form of `e^{i sigma_1 z sin(phi)}`.
pub fn bessel_identity_residual(z: f64, phi: f64, cutoff: usize) -> Result<f64> {
    let required = z.abs() + 10.0;
    if (cutoff as f64) < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    let exact = unitary_exponential(&sigma(1), -z * phi.sin())?;
    let j = bessel_sequence(cutoff as u32, z)?;
    let mut even = j[0];
    let mut odd = 0.0;
    for (k, jk) in j.iter().enumerate().skip(1) {
        if k % 2 == 0 {
            even += 2.0 * jk * (k as f64 * phi).cos();
        } else {
            odd += 2.0 * jk * (k as f64 * phi).sin();
        }
    }
    let series = Operator::identity(2) * even + sigma(1) * (I * odd);
    Ok((&exact - &series).max_norm())
}

/// Bessel coefficients up to the truncation index for the model's `z`.
fn bessel_table(p: &HhgParams) -> Vec<f64> {
    let z = p.z();
    let k = truncation_order(z);
    bessel_sequence(k, z).expect("truncation order is capped at the supported maximum")
}

/// First-order correction `B(t)` as coefficients of `sigma_3` and `sigma_2`.
fn first_order_coefficients(p: &HhgParams, j: &[f64], t: f64, secular: bool) -> (Complex64, Complex64) {
    let (w0, wl) = (p.omega0, p.omega_l);
    let mut s3 = 0.0;
    let mut s2 = 0.0;
    for (k, jk) in j.iter().enumerate().skip(1) {
        let kf = k as f64;
        if k % 2 == 0 {
            s3 += jk * (kf * wl * t).sin() / (kf * wl);
        } else {
            s2 += jk * ((kf * wl * t).cos() - 1.0) / (kf * wl);
        }
    }
    let mut b3 = -I * (w0 * s3);
    if secular {
        b3 -= I * (w0 / 2.0 * j[0] * t);
    }
    (b3, I * (w0 * s2))
}

fn first_order_state_with(p: &HhgParams, j: &[f64], init: &Populations, t: f64, renormalized: bool) -> StateVector {
    let (b3, b2) = first_order_coefficients(p, j, t, !renormalized);
    let correction = Operator::identity(2) + sigma(3) * b3 + sigma(2) * b2;
    let mut psi0 = init.to_state();
    if renormalized {
        psi0 = sigma3_phase(-p.omega0 / 2.0 * j[0] * t).apply(&psi0);
    }
    let rot = sigma1_rotation(p.z_half() * (p.omega_l * t).sin());
    (&rot * &correction).apply(&psi0)
}

/// Strong-field state through first order in `omega0`, Schrodinger picture.
///
/// Unrenormalised, the correction holds the secular term
/// `-i (omega0/2) J_0(z) t sigma_3`; renormalised, that term is replaced by
/// `e^{-i (omega0/2) J_0(z) t sigma_3}` acting on the initial state.
pub fn hhg_state_first_order(p: &HhgParams, init: &Populations, t: f64, renormalized: bool) -> StateVector {
    first_order_state_with(p, &bessel_table(p), init, t, renormalized)
}

/// Converts a Schrodinger-picture state at time `t` to the given picture.
pub fn to_picture(p: &HhgParams, t: f64, state: &StateVector, picture: Picture) -> StateVector {
    match picture {
        Picture::Schrodinger => state.clone(),
        Picture::Interaction => sigma3_phase(p.omega0 * t / 2.0).apply(state),
    }
}

/// The three parts of the closed-form dipole signal (before the `-d` factor).
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleComponents {
    pub times: Vec<f64>,
    /// `c2 c1* e^{-i omega0R t} + c.c.`
    pub carrier: Vec<f64>,
    /// Odd-harmonic comb weighted by `|c1|^2 - |c2|^2`.
    pub odd_harmonic: Vec<f64>,
    /// Hyper-Raman cross term weighted by `c1 c2`.
    pub hyper_raman: Vec<f64>,
    /// Largest imaginary part seen while evaluating the complex expressions.
    pub max_imaginary: f64,
}

fn dipole_terms(p: &HhgParams, j: &[f64], init: &Populations, t: f64) -> (Complex64, Complex64, Complex64) {
    let (w0, wl) = (p.omega0, p.omega_l);
    let w0r = w0 * j[0];
    let rabi = init.c2 * init.c1.conj() * Complex64::from_polar(1.0, -w0r * t);
    let carrier = rabi + rabi.conj();
    let mut odd_sum = 0.0;
    let mut even_sum = 0.0;
    for (k, jk) in j.iter().enumerate().skip(1) {
        let kf = k as f64;
        if k % 2 == 1 {
            odd_sum += jk * ((kf * wl * t).cos() - 1.0) / (kf / 2.0 * wl);
        } else {
            even_sum += jk * (kf * wl * t).sin() / (kf / 2.0 * wl);
        }
    }
    let weight = init.c1.norm_sqr() - init.c2.norm_sqr();
    let odd = Complex64::new(weight * w0 * odd_sum, 0.0);
    let cross_amp = init.c2.conj() * init.c1 * Complex64::from_polar(1.0, w0r * t);
    let cross = I * (cross_amp - cross_amp.conj()) * (w0 * even_sum);
    (carrier, odd, cross)
}

pub fn dipole_components(p: &HhgParams, init: &Populations, grid: &TimeGrid) -> DipoleComponents {
    let j = bessel_table(p);
    let times = grid.times();
    let terms: Vec<(Complex64, Complex64, Complex64)> = times.par_iter().map(|&t| dipole_terms(p, &j, init, t)).collect();
    let max_imaginary = terms.iter().map(|(a, b, c)| (a.im.abs()).max(b.im.abs()).max(c.im.abs())).fold(0.0, f64::max);
    DipoleComponents {
        carrier: terms.iter().map(|x| x.0.re).collect(),
        odd_harmonic: terms.iter().map(|x| x.1.re).collect(),
        hyper_raman: terms.iter().map(|x| x.2.re).collect(),
        times,
        max_imaginary,
    }
}

/// Closed-form dipole signal `x(t)` sampled on `grid`.
pub fn dipole_expectation(p: &HhgParams, init: &Populations, grid: &TimeGrid) -> Result<TimeSeries> {
    let c = dipole_components(p, init, grid);
    let values = (0..c.times.len()).map(|k| -p.dipole * (c.carrier[k] + c.odd_harmonic[k] + c.hyper_raman[k])).collect();
    TimeSeries::new(grid.spacing(), values)
}

/// `<psi(t)| -d sigma_1 |psi(t)>` from the renormalised first-order state.
pub fn dipole_from_state(p: &HhgParams, init: &Populations, grid: &TimeGrid, picture: Picture) -> Result<TimeSeries> {
    let j = bessel_table(p);
    let dip = sigma(1) * (-p.dipole);
    let values = grid
        .times()
        .par_iter()
        .map(|&t| {
            let psi = to_picture(p, t, &first_order_state_with(p, &j, init, t, true), picture);
            psi.inner(&dip.apply(&psi)).re
        })
        .collect();
    TimeSeries::new(grid.spacing(), values)
}

/// Max deviation between the closed-form signal and the state-based one.
pub fn dipole_cross_check(p: &HhgParams, init: &Populations, grid: &TimeGrid, picture: Picture) -> Result<f64> {
    let closed = dipole_expectation(p, init, grid)?;
    let from_state = dipole_from_state(p, init, grid, picture)?;
    Ok(closed.values.iter().zip(&from_state.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `periods * samples_per_period` nodes spaced `2 pi / (omegaL samples_per_period)`, starting at 0.
pub fn hhg_spectral_grid(p: &HhgParams, periods: usize, samples_per_period: usize) -> Result<TimeGrid> {
    let n = periods * samples_per_period;
    let dt = 2.0 * std::f64::consts::PI / (p.omega_l * samples_per_period as f64);
    TimeGrid::new(0.0, (n as f64 - 1.0) * dt, n)
}
