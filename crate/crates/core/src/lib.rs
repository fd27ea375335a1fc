//! Dyson and dual Dyson series for time-dependent quantum systems.
//!
//! The dual series expands around the adiabatic evolution instead of the free
//! one, so it converges where the perturbation is large. The crate pairs a
//! numerical engine for arbitrary sampled Hamiltonians with closed forms for
//! three models (Jaynes–Cummings sector, strongly driven two-level atom,
//! WKBJ) and the spectral tools used to read off harmonic and hyper-Raman
//! lines.

pub mod bessel;
pub mod cli;
pub mod engine;
pub mod error;
pub mod hhg;
pub mod jc;
pub mod linalg;
pub mod numerics;
pub mod ode;
pub mod spectrum;
pub mod wkbj;

pub use engine::{PropagatorSeries, TimeGrid};
pub use error::{Error, Result};
pub use linalg::{pauli, Operator, StateVector};
