//! Numerical Dyson and dual Dyson series for a sampled Hamiltonian `H(t)`.
//!
//! The Dyson partial sums are built order by order from the running integral
//! `T_k(t) = -i int_{t0}^{t} H(s) T_{k-1}(s) ds`, so every order costs one pass
//! over the grid. The dual series factors the evolution as `U_A(t) W(t)`, where
//! `U_A` is the adiabatic propagator assembled from instantaneous eigenframes
//! and `W` is the Dyson series of the transformed Hamiltonian `H'(t)`.
//!
//! Public entry points taking a closure re-run the computation on a grid with
//! doubled resolution and fail with [`Error::GridTooCoarse`] when the two
//! results disagree by more than [`GRID_CONVERGENCE_TOL`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigensystem, reference_component, spectral_sum, Eigensystem, Operator, StateVector, HERMITIAN_TOL, I,
};
use crate::numerics::{cumulative_integral, derivative};

pub const MAX_DYSON_ORDER: usize = 4;
pub const MAX_DUAL_ORDER: usize = 2;

/// Largest change (relative to `max(1, |U|)`) tolerated when the grid is doubled.
pub const GRID_CONVERGENCE_TOL: f64 = 1e-7;

/// Relative default for the minimum admissible eigenvalue gap.
pub const DEFAULT_DEGENERACY_FACTOR: f64 = 1e-8;

/// Tolerance for recognising `U_A^(k) = (U_A^(k-1))^dagger` in the superadiabatic chain.
pub const INVOLUTION_TOL: f64 = 1e-6;

/// Uniformly spaced nodes on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, samples: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::InvalidGrid("endpoints must be finite".into()));
        }
        if t1 <= t0 {
            return Err(Error::InvalidGrid(format!("t1 = {t1} must exceed t0 = {t0}")));
        }
        if samples < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {samples}")));
        }
        Ok(Self { t0, t1, samples })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn spacing(&self) -> f64 {
        (self.t1 - self.t0) / (self.samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.samples {
            self.t1
        } else {
            self.t0 + k as f64 * self.spacing()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.time(k)).collect()
    }

    /// Same interval with the spacing halved; node `k` here is node `2k` there.
    pub fn refined(&self) -> Self {
        Self { t0: self.t0, t1: self.t1, samples: 2 * self.samples - 1 }
    }

    pub fn sample<F: Fn(f64) -> Operator>(&self, f: F) -> Vec<Operator> {
        self.times().into_iter().map(f).collect()
    }
}

/// `t -> e^{i H0 t} V(t) e^{-i H0 t}`.
pub fn interaction_picture<F>(h0: &Operator, v: F) -> Result<impl Fn(f64) -> Operator>
where
    F: Fn(f64) -> Operator,
{
    let eig = hermitian_eigensystem(h0, HERMITIAN_TOL)?;
    Ok(move |t: f64| {
        let forward = spectral_sum(&eig, |e| Complex64::from_polar(1.0, e * t));
        let back = forward.adjoint();
        &(&forward * &v(t)) * &back
    })
}

/// Partial sums of a perturbation series at every grid node.
#[derive(Debug, Clone)]
pub struct PropagatorSeries {
    pub times: Vec<f64>,
    orders: Vec<Vec<Operator>>,
}

impl PropagatorSeries {
    /// Partial sum through order `k` at every node.
    pub fn order(&self, k: usize) -> &[Operator] {
        &self.orders[k]
    }

    pub fn max_order(&self) -> usize {
        self.orders.len() - 1
    }

    /// Partial sum through order `k` at the last node.
    pub fn final_value(&self, k: usize) -> &Operator {
        self.orders[k].last().expect("non-empty grid")
    }

    fn max_change_vs(&self, fine: &PropagatorSeries) -> f64 {
        let mut worst = 0.0f64;
        for (coarse_k, fine_k) in self.orders.iter().zip(&fine.orders) {
            for (j, u) in coarse_k.iter().enumerate() {
                let reference = &fine_k[2 * j];
                let scale = reference.max_norm().max(1.0);
                worst = worst.max((u - reference).max_norm() / scale);
            }
        }
        worst
    }
}

fn check_refinement(coarse: PropagatorSeries, fine: &PropagatorSeries) -> Result<PropagatorSeries> {
    let change = coarse.max_change_vs(fine);
    if change > GRID_CONVERGENCE_TOL {
        return Err(Error::GridTooCoarse { change, tol: GRID_CONVERGENCE_TOL });
    }
    Ok(coarse)
}

/// Dyson partial sums for pre-sampled `H` (no refinement check).
pub fn dyson_series_sampled(grid: &TimeGrid, h: &[Operator], order: usize) -> Result<PropagatorSeries> {
    if order > MAX_DYSON_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_DYSON_ORDER });
    }
    if h.len() != grid.samples() {
        return Err(Error::DimensionMismatch { expected: grid.samples(), got: h.len() });
    }
    let dim = h[0].dim();
    let identity = Operator::identity(dim);
    let mut partial = vec![identity.clone(); h.len()];
    let mut term = partial.clone();
    let mut orders = vec![partial.clone()];
    let minus_i = -I;
    for _ in 1..=order {
        let integrand: Vec<Operator> = h.iter().zip(&term).map(|(hj, tj)| (hj * tj) * minus_i).collect();
        term = cumulative_integral(&integrand, grid.spacing());
        for (p, t) in partial.iter_mut().zip(&term) {
            *p += t;
        }
        orders.push(partial.clone());
    }
    Ok(PropagatorSeries { times: grid.times(), orders })
}

/// Dyson series partial sums through `order` (at most 4).
pub fn dyson_propagate<F>(h: F, grid: &TimeGrid, order: usize) -> Result<PropagatorSeries>
where
    F: Fn(f64) -> Operator,
{
    let coarse = dyson_series_sampled(grid, &grid.sample(&h), order)?;
    let fine_grid = grid.refined();
    let fine = dyson_series_sampled(&fine_grid, &fine_grid.sample(&h), order)?;
    check_refinement(coarse, &fine)
}

/// Instantaneous eigenbasis of `H(t)` at one node, gauge-fixed along the grid.
#[derive(Debug, Clone)]
pub struct EigenFrame {
    pub time: f64,
    /// Energies in branch order (branches are tracked by overlap, not sorted).
    pub energies: Vec<f64>,
    pub vectors: Vec<StateVector>,
    /// `<n,t| i d/dt |n,t>` per branch.
    pub berry_connection: Vec<f64>,
}

/// Eigenframes of `H` along the grid.
///
/// Branches are continued by maximal overlap with the previous node. The
/// phase of each branch is fixed by holding one reference component at a
/// constant phase (real positive at `t0`); if that component becomes small
/// relative to the largest one, the branch is re-anchored on the largest
/// component, keeping the overlap with the previous node real and positive.
pub fn instantaneous_frames<F>(h: F, grid: &TimeGrid, degeneracy_tol: Option<f64>) -> Result<Vec<EigenFrame>>
where
    F: Fn(f64) -> Operator,
{
    frames_from_samples(grid, &grid.sample(h), degeneracy_tol)
}

pub fn frames_from_samples(grid: &TimeGrid, h: &[Operator], degeneracy_tol: Option<f64>) -> Result<Vec<EigenFrame>> {
    if h.len() != grid.samples() {
        return Err(Error::DimensionMismatch { expected: grid.samples(), got: h.len() });
    }
    let eigs: Vec<Eigensystem> = h.iter().map(|m| hermitian_eigensystem(m, HERMITIAN_TOL)).collect::<Result<_>>()?;
    let max_energy = eigs.iter().flat_map(|e| e.values.iter()).map(|v| v.abs()).fold(0.0, f64::max);
    let tol = degeneracy_tol.unwrap_or(DEFAULT_DEGENERACY_FACTOR * max_energy);
    for (k, eig) in eigs.iter().enumerate() {
        if let Some(gap) = eig.values.windows(2).map(|w| w[1] - w[0]).reduce(f64::min) {
            if gap <= tol {
                return Err(Error::DegeneracyCrossing { time: grid.time(k), gap, tol });
            }
        }
    }

    let dim = h[0].dim();
    let mut energies: Vec<Vec<f64>> = Vec::with_capacity(eigs.len());
    let mut vectors: Vec<Vec<StateVector>> = Vec::with_capacity(eigs.len());
    let mut anchors: Vec<(usize, f64)> = (0..dim).map(|n| (reference_component(&eigs[0].vectors[n], n), 0.0)).collect();
    energies.push(eigs[0].values.clone());
    vectors.push(eigs[0].vectors.clone());

    for eig in &eigs[1..] {
        let prev = vectors.last().unwrap();
        let assignment = match_by_overlap(prev, &eig.vectors);
        let mut e_now = Vec::with_capacity(dim);
        let mut v_now = Vec::with_capacity(dim);
        for (branch, &j) in assignment.iter().enumerate() {
            let mut v = eig.vectors[j].clone();
            let (anchor, phase) = anchors[branch];
            let largest = v.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
            if v[anchor].norm() >= 0.5 * largest {
                let z = v[anchor];
                v = v.scale(Complex64::from_polar(1.0, phase - z.arg()));
            } else {
                let overlap = prev[branch].inner(&v);
                v = v.scale(overlap.conj() / overlap.norm());
                let new_anchor = reference_component(&v, branch);
                anchors[branch] = (new_anchor, v[new_anchor].arg());
            }
            e_now.push(eig.values[j]);
            v_now.push(v);
        }
        energies.push(e_now);
        vectors.push(v_now);
    }

    let h_step = grid.spacing();
    let mut connections = vec![vec![0.0; dim]; eigs.len()];
    for branch in 0..dim {
        let path: Vec<StateVector> = vectors.iter().map(|vs| vs[branch].clone()).collect();
        let d = derivative(&path, h_step);
        for (k, (v, dv)) in path.iter().zip(&d).enumerate() {
            connections[k][branch] = -v.inner(dv).im;
        }
    }

    Ok(energies
        .into_iter()
        .zip(vectors)
        .zip(connections)
        .enumerate()
        .map(|(k, ((energies, vectors), berry_connection))| EigenFrame {
            time: grid.time(k),
            energies,
            vectors,
            berry_connection,
        })
        .collect())
}

/// Greedy maximal-overlap pairing; `result[branch]` indexes `current`.
fn match_by_overlap(previous: &[StateVector], current: &[StateVector]) -> Vec<usize> {
    let n = previous.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in previous.iter().enumerate() {
        for (j, c) in current.iter().enumerate() {
            pairs.push((p.inner(c).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut result = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in pairs {
        if result[i] == usize::MAX && !taken[j] {
            result[i] = j;
            taken[j] = true;
        }
    }
    result
}

fn frame_spacing(frames: &[EigenFrame]) -> f64 {
    if frames.len() < 2 {
        1.0
    } else {
        frames[1].time - frames[0].time
    }
}

/// `gamma_n(t) = int_{t0}^{t} <n| i d/dt |n>`, indexed `[branch][node]`.
pub fn berry_phases(frames: &[EigenFrame]) -> Vec<Vec<f64>> {
    let h = frame_spacing(frames);
    let dim = frames.first().map(|f| f.energies.len()).unwrap_or(0);
    (0..dim)
        .map(|n| {
            let conn: Vec<f64> = frames.iter().map(|f| f.berry_connection[n]).collect();
            cumulative_integral(&conn, h)
        })
        .collect()
}

/// `int_{t0}^{t} E_n`, indexed `[branch][node]`.
pub fn dynamical_phases(frames: &[EigenFrame]) -> Vec<Vec<f64>> {
    let h = frame_spacing(frames);
    let dim = frames.first().map(|f| f.energies.len()).unwrap_or(0);
    (0..dim)
        .map(|n| {
            let e: Vec<f64> = frames.iter().map(|f| f.energies[n]).collect();
            cumulative_integral(&e, h)
        })
        .collect()
}

/// `U_A(t) = sum_n exp(i gamma_n - i int E_n) |n,t><n,t0|` at every node.
pub fn adiabatic_propagator(frames: &[EigenFrame]) -> Vec<Operator> {
    let gamma = berry_phases(frames);
    let dynamical = dynamical_phases(frames);
    let initial = &frames[0].vectors;
    frames
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let dim = f.vectors.len();
            let mut u = Operator::zeros(initial[0].dim());
            for n in 0..dim {
                let phase = Complex64::from_polar(1.0, gamma[n][k] - dynamical[n][k]);
                u += &(Operator::outer(&f.vectors[n], &initial[n]) * phase);
            }
            u
        })
        .collect()
}

/// Transformed Hamiltonian of the dual series, expressed in the `|n,t0>` basis.
pub fn dual_hamiltonian(frames: &[EigenFrame]) -> Result<Vec<Operator>> {
    if frames.len() < 2 {
        return Err(Error::InvalidArgument("need at least two frames".into()));
    }
    for f in frames {
        if f.energies.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegeneracyCrossing { time: f.time, gap: 0.0, tol: 0.0 });
        }
    }
    let h = frame_spacing(frames);
    let dim = frames[0].vectors.len();
    let gamma = berry_phases(frames);
    let dynamical = dynamical_phases(frames);
    let derivs: Vec<Vec<StateVector>> = (0..dim)
        .map(|n| {
            let path: Vec<StateVector> = frames.iter().map(|f| f.vectors[n].clone()).collect();
            derivative(&path, h)
        })
        .collect();
    let initial = &frames[0].vectors;
    let basis: Vec<Vec<Operator>> = (0..dim)
        .map(|m| (0..dim).map(|n| Operator::outer(&initial[m], &initial[n])).collect())
        .collect();

    Ok(frames
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let mut out = Operator::zeros(initial[0].dim());
            for m in 0..dim {
                for n in 0..dim {
                    if m == n {
                        continue;
                    }
                    let coupling = I * f.vectors[m].inner(&derivs[n][k]);
                    let phase = Complex64::from_polar(
                        1.0,
                        -(gamma[m][k] - gamma[n][k]) + (dynamical[m][k] - dynamical[n][k]),
                    );
                    out += &(basis[m][n].clone() * (-(phase * coupling)));
                }
            }
            out
        })
        .collect())
}

fn dual_series_sampled(grid: &TimeGrid, h: &[Operator], order: usize) -> Result<PropagatorSeries> {
    let frames = frames_from_samples(grid, h, None)?;
    let ua = adiabatic_propagator(&frames);
    let h_dual = dual_hamiltonian(&frames)?;
    let inner = dyson_series_sampled(grid, &h_dual, order)?;
    let orders = inner
        .orders
        .iter()
        .map(|partials| ua.iter().zip(partials).map(|(u, w)| u * w).collect())
        .collect();
    Ok(PropagatorSeries { times: inner.times, orders })
}

/// Dual Dyson partial sums `U_A(t) * [Dyson of H'](t)` through `order` (at most 2).
pub fn dual_dyson_propagate<F>(h: F, grid: &TimeGrid, order: usize) -> Result<PropagatorSeries>
where
    F: Fn(f64) -> Operator,
{
    if order > MAX_DUAL_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_DUAL_ORDER });
    }
    let coarse = dual_series_sampled(grid, &grid.sample(&h), order)?;
    let fine_grid = grid.refined();
    let fine = dual_series_sampled(&fine_grid, &fine_grid.sample(&h), order)?;
    check_refinement(coarse, &fine)
}

/// One adiabatic transformation in the superadiabatic chain.
#[derive(Debug, Clone)]
pub struct SuperadiabaticStep {
    /// `U_A^(k)` at every node.
    pub propagator: Vec<Operator>,
    /// `H^(k)`, the Hamiltonian left over after this step.
    pub hamiltonian: Vec<Operator>,
    /// `max_t |H^(k)(t)|` (entry max-norm).
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SuperadiabaticChain {
    pub times: Vec<f64>,
    pub steps: Vec<SuperadiabaticStep>,
    /// First step `k >= 2` with `U_A^(k) = (U_A^(k-1))^dagger`.
    pub involution_step: Option<usize>,
    /// Set when the residual Hamiltonian vanished and the chain stopped.
    pub vanished_at: Option<usize>,
}

impl SuperadiabaticChain {
    /// `U_A^(1) ... U_A^(K) * [Dyson of H^(K) through residual_order]` at every node.
    pub fn approximate_propagator(&self, grid: &TimeGrid, residual_order: usize) -> Result<Vec<Operator>> {
        let last = self.steps.last().expect("chain has at least one step");
        let residual = dyson_series_sampled(grid, &last.hamiltonian, residual_order)?;
        Ok((0..self.times.len())
            .map(|k| {
                let mut u = self.steps[0].propagator[k].clone();
                for step in &self.steps[1..] {
                    u = &u * &step.propagator[k];
                }
                &u * &residual.order(residual_order)[k]
            })
            .collect())
    }
}

/// Iterates frames -> `U_A` -> `H'` up to `steps` times.
///
/// The chain stops early if the residual Hamiltonian vanishes. The first step
/// at which `U_A^(k)` undoes the previous step is recorded; iteration
/// continues past it since later steps then just repeat the cycle.
pub fn superadiabatic_iterate<F>(h: F, grid: &TimeGrid, steps: usize) -> Result<SuperadiabaticChain>
where
    F: Fn(f64) -> Operator,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("superadiabatic chain needs at least one step".into()));
    }
    let mut current = grid.sample(h);
    let scale = current.iter().map(|m| m.max_norm()).fold(0.0, f64::max).max(1.0);
    let mut chain = SuperadiabaticChain { times: grid.times(), steps: Vec::new(), involution_step: None, vanished_at: None };
    for k in 1..=steps {
        let frames = frames_from_samples(grid, &current, None)?;
        let propagator = adiabatic_propagator(&frames);
        let hamiltonian = dual_hamiltonian(&frames)?;
        let residual_norm = hamiltonian.iter().map(|m| m.max_norm()).fold(0.0, f64::max);
        if chain.involution_step.is_none() && k >= 2 {
            let prev = &chain.steps[k - 2].propagator;
            let defect = prev.iter().zip(&propagator).map(|(p, u)| (&p.adjoint() - u).max_norm()).fold(0.0, f64::max);
            if defect <= INVOLUTION_TOL {
                chain.involution_step = Some(k);
            }
        }
        chain.steps.push(SuperadiabaticStep { propagator, hamiltonian: hamiltonian.clone(), residual_norm });
        if residual_norm <= 1e-12 * scale {
            chain.vanished_at = Some(k);
            break;
        }
        current = hamiltonian;
    }
    Ok(chain)
}
