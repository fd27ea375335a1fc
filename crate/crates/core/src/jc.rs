//! Jaynes–Cummings dynamics restricted to one excitation sector.
//!
//! Amplitudes are ordered `(|1,n+1>, |2,n>)` throughout. The sector
//! Hamiltonian is taken in the interaction picture, where it is purely
//! off-diagonal with phases `e^{-/+ i Delta t}`.
//!
//! Besides the exact solution there are two truncated closed forms: the weak
//! coupling expansion in `lambda = R_n / Delta` (what a Dyson series
//! produces) and the strong coupling expansion in `1 / lambda` (what the dual
//! series produces).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub n: u32,
}

impl JcParams {
    pub fn new(omega: f64, omega0: f64, g: f64, n: u32) -> Self {
        Self { omega, omega0, g, n }
    }

    /// Vacuum sector with field frequency 1 and the given detuning and Rabi frequency.
    pub fn from_detuning(detuning: f64, rabi: f64) -> Self {
        Self { omega: 1.0, omega0: 1.0 + detuning, g: rabi / 2.0, n: 0 }
    }

    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    /// `R_n = 2 g sqrt(n+1)`.
    pub fn rabi(&self) -> f64 {
        2.0 * self.g * (self.n as f64 + 1.0).sqrt()
    }

    /// `Omega_n = sqrt(Delta^2 + R_n^2)`.
    pub fn generalized_rabi(&self) -> f64 {
        self.detuning().hypot(self.rabi())
    }

    /// `lambda = R_n / Delta`.
    pub fn lambda(&self) -> Result<f64> {
        let d = self.detuning();
        if d == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        Ok(self.rabi() / d)
    }

    fn coupling(&self) -> f64 {
        self.g * (self.n as f64 + 1.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcAmplitudes {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl JcAmplitudes {
    pub fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn norm(&self) -> f64 {
        (self.c1.norm_sqr() + self.c2.norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { c1: self.c1 / n, c2: self.c2 / n }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.c1 - other.c1).norm().max((self.c2 - other.c2).norm())
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::new(vec![self.c1, self.c2])
    }

    pub fn from_state(s: &StateVector) -> Result<Self> {
        if s.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: s.dim() });
        }
        Ok(Self { c1: s[0], c2: s[1] })
    }
}

/// Exact sector amplitudes at time `t`.
pub fn jc_exact(params: &JcParams, init: &JcAmplitudes, t: f64) -> JcAmplitudes {
    let d = params.detuning();
    let r = params.rabi();
    let w = params.generalized_rabi();
    let (s, c) = (w * t / 2.0).sin_cos();
    // d/w and r/w both -> 0 as the sine does when w = 0; take the limit
    let (dw, rw) = if w == 0.0 { (0.0, 0.0) } else { (d / w, r / w) };
    let c1 = (init.c1 * Complex64::new(c, dw * s) - init.c2 * I * (rw * s)) * Complex64::from_polar(1.0, -d * t / 2.0);
    let c2 = (init.c2 * Complex64::new(c, -dw * s) - init.c1 * I * (rw * s)) * Complex64::from_polar(1.0, d * t / 2.0);
    JcAmplitudes { c1, c2 }
}

/// Exact propagator as a matrix: columns are the evolved basis states.
pub fn jc_exact_propagator(params: &JcParams, t: f64) -> Operator {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let a = jc_exact(params, &JcAmplitudes::new(one, zero), t);
    let b = jc_exact(params, &JcAmplitudes::new(zero, one), t);
    Operator::from_rows(&[[a.c1, b.c1], [a.c2, b.c2]])
}

pub fn jc_sector_hamiltonian(params: &JcParams, t: f64) -> Operator {
    let k = params.coupling();
    let d = params.detuning();
    let zero = Complex64::new(0.0, 0.0);
    Operator::from_rows(&[
        [zero, Complex64::from_polar(k, -d * t)],
        [Complex64::from_polar(k, d * t), zero],
    ])
}

/// `(|a,n,t>, |b,n,t>)` with eigenvalues `+g sqrt(n+1)` and `-g sqrt(n+1)`.
pub fn jc_dressed_states(params: &JcParams, t: f64) -> (StateVector, StateVector) {
    let d = params.detuning();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = StateVector::new(vec![Complex64::from_polar(h, -d * t), Complex64::new(h, 0.0)]);
    let b = StateVector::new(vec![Complex64::new(h, 0.0), -Complex64::from_polar(h, d * t)]);
    (a, b)
}

/// `(<a| i d/dt |a>, <b| i d/dt |b>) = (Delta/2, -Delta/2)`.
pub fn jc_berry_connections(params: &JcParams) -> (f64, f64) {
    let d = params.detuning();
    (d / 2.0, -d / 2.0)
}

/// Weak-coupling truncation through `lambda^order`.
///
/// With `resummed`, the detuning inside the exponentials is replaced by
/// `Delta' = Delta + R_n^2 / (2 Delta)`. The replacement absorbs the term
/// linear in `t` at second order, which is dropped together with it.
pub fn jc_dyson_closed(params: &JcParams, init: &JcAmplitudes, t: f64, order: u32, resummed: bool) -> Result<JcAmplitudes> {
    let lambda = params.lambda()?;
    if order > 2 {
        return Err(Error::OrderTooHigh { order: order as usize, max: 2 });
    }
    if order == 0 {
        return Ok(*init);
    }
    let d = params.detuning();
    let l2 = lambda * lambda / 4.0;
    let half = lambda / 2.0;
    let (c10, c20) = (init.c1, init.c2);
    if resummed {
        let dp = d + params.rabi().powi(2) / (2.0 * d);
        let shift = dp - d;
        let e = Complex64::from_polar(1.0, -dp * t);
        let mut c1 = c10 - c20 * half * (1.0 - e);
        let mut c2 = c20 - c10 * half * (e.conj() - 1.0);
        if order == 2 {
            c1 += c10 * (e * l2 - l2);
            c2 += c20 * (e.conj() * l2 - l2);
        }
        return Ok(JcAmplitudes {
            c1: c1 * Complex64::from_polar(1.0, shift * t / 2.0),
            c2: c2 * Complex64::from_polar(1.0, -shift * t / 2.0),
        });
    }
    let e = Complex64::from_polar(1.0, -d * t);
    let mut c1 = c10 - c20 * half * (1.0 - e);
    let mut c2 = c20 - c10 * half * (e.conj() - 1.0);
    if order == 2 {
        c1 += c10 * I * l2 * (d * t + I * (1.0 - e));
        c2 -= c20 * I * l2 * (d * t + I * (e.conj() - 1.0));
    }
    Ok(JcAmplitudes { c1, c2 })
}

/// Strong-coupling truncation through `(1/lambda)^order`.
///
/// The detuning phases `e^{-/+ i Delta t/2}` are kept exactly; only the
/// remaining factor is expanded.
pub fn jc_dual_closed(params: &JcParams, init: &JcAmplitudes, t: f64, order: u32) -> Result<JcAmplitudes> {
    let r = params.rabi();
    if r == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if order > 2 {
        return Err(Error::OrderTooHigh { order: order as usize, max: 2 });
    }
    let d = params.detuning();
    let x = d / r;
    let (s, c) = (r * t / 2.0).sin_cos();
    let (c10, c20) = (init.c1, init.c2);
    let mut b1 = c10 * c - c20 * I * s;
    let mut b2 = c20 * c - c10 * I * s;
    if order >= 1 {
        b1 += c10 * I * (x * s);
        b2 -= c20 * I * (x * s);
    }
    if order >= 2 {
        let x2 = x * x;
        let secular = x2 * r * t / 4.0;
        b1 += -c10 * (secular * s) - c20 * I * (secular * c - x2 * s / 2.0);
        b2 += -c20 * (secular * s) - c10 * I * (secular * c - x2 * s / 2.0);
    }
    Ok(JcAmplitudes {
        c1: b1 * Complex64::from_polar(1.0, -d * t / 2.0),
        c2: b2 * Complex64::from_polar(1.0, d * t / 2.0),
    })
}

/// Leading strong-coupling propagator: dressed-state Rabi mixing with detuning phases.
pub fn jc_leading_propagator(params: &JcParams, t: f64) -> Operator {
    let r = params.rabi();
    let d = params.detuning();
    let (s, c) = (r * t / 2.0).sin_cos();
    let m = Complex64::from_polar(1.0, -d * t / 2.0);
    let p = m.conj();
    Operator::from_rows(&[[m * c, -I * m * s], [-I * p * s, p * c]])
}

/// Closed form of the transformed Hamiltonian of the dual series, in the sector basis.
pub fn jc_dual_hamiltonian(params: &JcParams, t: f64) -> Operator {
    let d = params.detuning();
    let (s, c) = (params.rabi() * t).sin_cos();
    let k = -d / 2.0;
    Operator::from_rows(&[
        [Complex64::new(k * c, 0.0), Complex64::new(0.0, -k * s)],
        [Complex64::new(0.0, k * s), Complex64::new(-k * c, 0.0)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{dual_dyson_propagate, dyson_propagate, instantaneous_frames, dual_hamiltonian, TimeGrid};
    use crate::ode::{integrate, OdeOptions};
    use proptest::prelude::*;

    fn amp(c1: (f64, f64), c2: (f64, f64)) -> JcAmplitudes {
        JcAmplitudes::new(Complex64::new(c1.0, c1.1), Complex64::new(c2.0, c2.1))
    }

    fn ode_oracle(p: &JcParams, init: &JcAmplitudes, t: f64) -> JcAmplitudes {
        let f = |s: f64, y: &[Complex64]| {
            let h = jc_sector_hamiltonian(p, s);
            vec![-I * (h[(0, 0)] * y[0] + h[(0, 1)] * y[1]), -I * (h[(1, 0)] * y[0] + h[(1, 1)] * y[1])]
        };
        let y = integrate(f, 0.0, &[init.c1, init.c2], t, OdeOptions::with_tol(1e-13)).unwrap();
        JcAmplitudes::new(y[0], y[1])
    }

    #[test]
    fn zero_coupling_leaves_amplitudes_unchanged() {
        let p = JcParams::new(1.0, 1.7, 0.0, 3);
        let init = amp((0.6, 0.0), (0.0, 0.8));
        for t in [0.0, 1.0, 17.0] {
            assert!(jc_exact(&p, &init, t).max_abs_diff(&init) < 1e-14);
        }
    }

    #[test]
    fn resonant_full_rabi_flop() {
        let p = JcParams::new(2.0, 2.0, 0.3, 2);
        let out = jc_exact(&p, &amp((0.0, 0.0), (1.0, 0.0)), std::f64::consts::PI / p.rabi());
        assert!((out.c1.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_matches_ode_example() {
        let p = JcParams::new(1.0, 1.5, 0.1, 0);
        let init = amp((1.0, 0.0), (0.0, 0.0));
        let e = jc_exact(&p, &init, 3.0);
        assert!(e.max_abs_diff(&ode_oracle(&p, &init, 3.0)) < 1e-9);
    }

    #[test]
    fn hamiltonian_examples() {
        let p = JcParams::new(1.0, 1.4, 0.25, 3);
        let k = 0.25 * 2.0;
        let h0 = jc_sector_hamiltonian(&p, 0.0);
        assert!((h0[(0, 1)] - Complex64::new(k, 0.0)).norm() < 1e-15);
        assert!(h0.is_hermitian(0.0));
        let resonant = JcParams::new(1.0, 1.0, 0.25, 3);
        assert_eq!(jc_sector_hamiltonian(&resonant, 0.0), jc_sector_hamiltonian(&resonant, 9.0));
    }

    #[test]
    fn dressed_states_are_orthonormal_eigenvectors() {
        let p = JcParams::new(1.0, 1.3, 0.2, 1);
        let k = p.g * 2f64.sqrt();
        for t in [0.0, 0.7, 4.2] {
            let (a, b) = jc_dressed_states(&p, t);
            let h = jc_sector_hamiltonian(&p, t);
            assert!((h.apply(&a) - a.clone() * k).norm() <= 1e-12);
            assert!((h.apply(&b) + b.clone() * k).norm() <= 1e-12);
            assert!(a.inner(&b).norm() < 1e-12);
        }
        let (a, b) = jc_dressed_states(&p, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0].re - h).abs() < 1e-15 && (a[1].re - h).abs() < 1e-15);
        assert!((b[0].re - h).abs() < 1e-15 && (b[1].re + h).abs() < 1e-15);
    }

    #[test]
    fn numerical_frames_reproduce_dressed_state_connections() {
        let p = JcParams::from_detuning(0.8, 0.5);
        let grid = TimeGrid::new(0.0, 10.0, 4096).unwrap();
        let frames = instantaneous_frames(|t| jc_sector_hamiltonian(&p, t), &grid, None).unwrap();
        // sorted ascending: branch 0 is b (-g), branch 1 is a (+g)
        let (ga, gb) = jc_berry_connections(&p);
        for f in &frames {
            assert!((f.berry_connection[1] - ga).abs() < 1e-8 * ga.abs());
            assert!((f.berry_connection[0] - gb).abs() < 1e-8 * gb.abs());
        }
    }

    #[test]
    fn numerical_dual_hamiltonian_matches_closed_form() {
        let p = JcParams::from_detuning(0.3, 1.2);
        let grid = TimeGrid::new(0.0, 6.0, 2048).unwrap();
        let frames = instantaneous_frames(|t| jc_sector_hamiltonian(&p, t), &grid, None).unwrap();
        let hd = dual_hamiltonian(&frames).unwrap();
        for (f, h) in frames.iter().zip(&hd) {
            let closed = jc_dual_hamiltonian(&p, f.time);
            assert!((h - &closed).max_norm() < 1e-8, "t = {}", f.time);
        }
    }

    #[test]
    fn leading_propagator_is_dual_order_zero() {
        let p = JcParams::from_detuning(0.2, 1.0);
        let init = amp((0.6, 0.1), (0.2, -0.7)).normalized();
        for t in [0.0, 1.1, 5.0] {
            let u0 = jc_leading_propagator(&p, t);
            let via_op = JcAmplitudes::from_state(&u0.apply(&init.to_state())).unwrap();
            assert!(via_op.max_abs_diff(&jc_dual_closed(&p, &init, t, 0).unwrap()) < 1e-15);
            assert!(u0.is_unitary(1e-12));
        }
    }

    #[test]
    fn dual_first_order_increment() {
        let p = JcParams::from_detuning(0.1, 1.0);
        let init = amp((0.8, 0.0), (0.0, 0.6));
        let t = 2.3;
        let lam = p.lambda().unwrap();
        let inc = JcAmplitudes {
            c1: jc_dual_closed(&p, &init, t, 1).unwrap().c1 - jc_dual_closed(&p, &init, t, 0).unwrap().c1,
            c2: jc_dual_closed(&p, &init, t, 1).unwrap().c2 - jc_dual_closed(&p, &init, t, 0).unwrap().c2,
        };
        let s = (p.rabi() * t / 2.0).sin();
        let d = p.detuning();
        let e1 = I * (s / lam) * Complex64::from_polar(1.0, -d * t / 2.0) * init.c1;
        let e2 = -I * (s / lam) * Complex64::from_polar(1.0, d * t / 2.0) * init.c2;
        assert!((inc.c1 - e1).norm() < 1e-15 && (inc.c2 - e2).norm() < 1e-15);
    }

    #[test]
    fn order_zero_and_errors() {
        let p = JcParams::from_detuning(1.0, 0.1);
        let init = amp((0.6, 0.0), (0.8, 0.0));
        assert_eq!(jc_dyson_closed(&p, &init, 3.0, 0, false).unwrap(), init);
        let resonant = JcParams::new(1.0, 1.0, 0.1, 0);
        assert_eq!(jc_dyson_closed(&resonant, &init, 1.0, 1, false), Err(Error::ZeroDetuning));
        let free = JcParams::new(1.0, 1.3, 0.0, 0);
        assert_eq!(jc_dual_closed(&free, &init, 1.0, 1), Err(Error::ZeroCoupling));
    }

    #[test]
    fn unresummed_second_order_error_is_cubic() {
        let init = amp((1.0, 0.0), (0.0, 0.0));
        let err = |lam: f64| {
            let p = JcParams::from_detuning(1.0, lam);
            jc_dyson_closed(&p, &init, 2.0, 2, false).unwrap().max_abs_diff(&jc_exact(&p, &init, 2.0))
        };
        let slope = (err(0.2) / err(0.05)).ln() / 4f64.ln();
        assert!((slope - 3.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn dual_second_order_error_is_cubic() {
        let init = amp((0.6, 0.0), (0.0, 0.8));
        let err = |lam: f64| {
            let p = JcParams::from_detuning(1.0 / lam, 1.0);
            let t = 6.0 * std::f64::consts::PI / p.rabi();
            jc_dual_closed(&p, &init, t, 2).unwrap().max_abs_diff(&jc_exact(&p, &init, t))
        };
        let slope = (err(5.0) / err(20.0)).ln() / 4f64.ln();
        assert!((slope - 3.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn engine_reproduces_weak_coupling_closed_form() {
        let p = JcParams::from_detuning(1.0, 0.2);
        let grid = TimeGrid::new(0.0, 10.0, 4096).unwrap();
        let series = dyson_propagate(|t| jc_sector_hamiltonian(&p, t), &grid, 2).unwrap();
        let init = amp((0.6, 0.0), (0.0, 0.8));
        for order in 0..=2 {
            for (t, u) in series.times.iter().zip(series.order(order)).step_by(64) {
                let num = JcAmplitudes::from_state(&u.apply(&init.to_state())).unwrap();
                let closed = jc_dyson_closed(&p, &init, *t, order as u32, false).unwrap();
                assert!(num.max_abs_diff(&closed) < 1e-6, "order {order} t {t}");
            }
        }
    }

    #[test]
    fn engine_reproduces_strong_coupling_closed_form() {
        let p = JcParams::from_detuning(0.1, 1.0);
        let grid = TimeGrid::new(0.0, 6.0 * std::f64::consts::PI, 4096).unwrap();
        let series = dual_dyson_propagate(|t| jc_sector_hamiltonian(&p, t), &grid, 2).unwrap();
        let init = amp((0.6, 0.0), (0.0, 0.8));
        for order in 0..=2 {
            for (t, u) in series.times.iter().zip(series.order(order)).step_by(64) {
                let num = JcAmplitudes::from_state(&u.apply(&init.to_state())).unwrap();
                let closed = jc_dual_closed(&p, &init, *t, order as u32).unwrap();
                assert!(num.max_abs_diff(&closed) < 1e-6, "order {order} t {t}");
            }
        }
    }

    proptest! {
        #[test]
        fn exact_evolution_is_unitary(
            omega in 0.5f64..2.0, detuning in -1.0f64..1.0, g in 0.0f64..0.5, n in 0u32..6, t in 0.0f64..50.0,
            a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0,
        ) {
            prop_assume!(a * a + b * b + c * c + d * d > 1e-3);
            let p = JcParams::new(omega, omega + detuning, g, n);
            let init = amp((a, b), (c, d)).normalized();
            prop_assert!((jc_exact(&p, &init, t).norm() - 1.0).abs() <= 1e-12);
            prop_assert!(jc_exact_propagator(&p, t).is_unitary(1e-12));
        }
    }
}
