use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max asymmetry {asymmetry:.3e} > tol {tol:.3e})")]
    NotHermitian { asymmetry: f64, tol: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("Pauli index must be 1, 2 or 3, got {0}")]
    BadIndex(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("series order {order} exceeds the cap {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("grid too coarse: doubling the samples moved the result by {change:.3e} (tol {tol:.1e})")]
    GridTooCoarse { change: f64, tol: f64 },
    #[error("degenerate instantaneous spectrum at t = {time} (gap {gap:.3e} <= {tol:.3e})")]
    DegeneracyCrossing { time: f64, gap: f64, tol: f64 },
    #[error("Bessel order {0} exceeds the supported maximum of 64")]
    OrderTooLarge(u32),
    #[error("detuning is zero; the weak-coupling expansion is undefined")]
    ZeroDetuning,
    #[error("coupling is zero; the strong-coupling expansion is undefined")]
    ZeroCoupling,
    #[error("Bessel cutoff {cutoff} is below z + 10 = {required:.2}")]
    CutoffTooSmall { cutoff: usize, required: f64 },
    #[error("alpha(x) <= 0 at x = {x} (turning point)")]
    TurningPoint { x: f64 },
    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("series length {0} is not a power of two >= 2")]
    BadLength(usize),
    #[error("spectrum has fewer than three bins")]
    EmptySpectrum,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
