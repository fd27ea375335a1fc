//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for N <= 16 (N = 2 for almost every model in the
//! crate). Matrices are stored row-major. The Hermitian eigensolver uses cyclic
//! complex Jacobi rotations, so results are fully deterministic.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default symmetry tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds an operator from rows; panics on a ragged or non-square input.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "operator rows must form a square matrix");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &StateVector, v: &StateVector) -> Self {
        assert_eq!(u.dim(), v.dim());
        let dim = u.dim();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= f * v;
                }
            }
        }
        det
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_finite() && self.hermitian_defect() <= tol
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self - Self::identity(self.dim)).max_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && self.unitarity_defect() <= tol
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim(), "operator/state dimension mismatch");
        let mut out = StateVector::zeros(self.dim);
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self[(i, j)] * v[j]).sum();
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    fn check_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        let asymmetry = self.hermitian_defect();
        if asymmetry > tol {
            return Err(Error::NotHermitian { asymmetry, tol });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})[", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| format!("{:+.6e}{:+.6e}i", self[(i, j)].re, self[(i, j)].im))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        &self * &rhs
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(mut self, rhs: f64) -> Operator {
        self.data.iter_mut().for_each(|z| *z *= rhs);
        self
    }
}

impl Mul<Complex64> for Operator {
    type Output = Operator;
    fn mul(mut self, rhs: Complex64) -> Operator {
        self.data.iter_mut().for_each(|z| *z *= rhs);
        self
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(mut self, rhs: Operator) -> Operator {
        self += &rhs;
        self
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.clone() + rhs.clone()
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a += b);
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(mut self, rhs: Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.clone() - rhs.clone()
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self * -1.0
    }
}

/// Column of complex amplitudes.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "state dimension must be positive");
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// Unit vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v[k] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.amps.iter().map(|z| z * s).collect())
    }

    pub fn normalized(&self) -> Self {
        self.scale(Complex64::new(1.0 / self.norm(), 0.0))
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.amps[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

impl Add for StateVector {
    type Output = StateVector;
    fn add(mut self, rhs: StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim());
        self.amps.iter_mut().zip(&rhs.amps).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for StateVector {
    type Output = StateVector;
    fn sub(mut self, rhs: StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim());
        self.amps.iter_mut().zip(&rhs.amps).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Mul<f64> for StateVector {
    type Output = StateVector;
    fn mul(mut self, rhs: f64) -> StateVector {
        self.amps.iter_mut().for_each(|z| *z *= rhs);
        self
    }
}

/// Pauli matrix `sigma_k` in the ordered basis (|2>, |1>) = ((1,0), (0,1)).
pub fn pauli(k: usize) -> Result<Operator> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match k {
        1 => Ok(Operator::from_rows(&[[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])),
        2 => Ok(Operator::from_rows(&[[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]])),
        3 => Ok(Operator::from_rows(&[[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])),
        _ => Err(Error::BadIndex(k)),
    }
}

pub(crate) fn sigma(k: usize) -> Operator {
    pauli(k).expect("valid Pauli index")
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

/// Diagonalizes a Hermitian operator with cyclic complex Jacobi rotations.
///
/// Each eigenvector's phase is fixed so that one reference component is real
/// and positive: the component at the eigenvector's own level index when it is
/// (to 1e-9) among the largest in modulus, otherwise the first largest one.
pub fn hermitian_eigensystem(a: &Operator, tol: f64) -> Result<Eigensystem> {
    a.check_hermitian(tol)?;
    let n = a.dim();
    let mut m = a.clone();
    // Symmetrize so rounding-level asymmetry does not leak into the rotations.
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = Operator::identity(n);
    let scale = m.max_norm();

    if n > 1 && scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re).then(x.cmp(&y)));

    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = order
        .iter()
        .enumerate()
        .map(|(level, &k)| {
            let col = StateVector::new((0..n).map(|i| v[(i, k)]).collect());
            fix_phase(col, level)
        })
        .collect();
    Ok(Eigensystem { values, vectors })
}

/// One Jacobi rotation zeroing `m[(p, q)]`; accumulates the rotation into `v`.
fn rotate(m: &mut Operator, v: &mut Operator, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Phase that makes the (p, q) entry real, then a real symmetric rotation.
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G restricted to (p, q) = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = m.dim();
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * gpp + akq * gqp;
        m[(k, q)] = akp * gpq + akq * gqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        m[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

pub(crate) fn reference_component(v: &StateVector, preferred: usize) -> usize {
    let max = v.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if preferred < v.dim() && v[preferred].norm() >= max - 1e-9 {
        return preferred;
    }
    v.amplitudes().iter().position(|z| z.norm() >= max - 1e-9).unwrap_or(0)
}

fn fix_phase(v: StateVector, level: usize) -> StateVector {
    let r = reference_component(&v, level);
    let z = v[r];
    if z.norm() == 0.0 {
        return v;
    }
    v.scale(z.conj() / z.norm())
}

/// `exp(-i H t)` through the eigen-decomposition of `H`.
pub fn unitary_exponential(h: &Operator, t: f64) -> Result<Operator> {
    let eig = hermitian_eigensystem(h, HERMITIAN_TOL)?;
    if t == 0.0 {
        return Ok(Operator::identity(h.dim()));
    }
    Ok(spectral_sum(&eig, |e| Complex64::from_polar(1.0, -e * t)))
}

/// `sum_n f(E_n) |n><n|`
pub(crate) fn spectral_sum(eig: &Eigensystem, f: impl Fn(f64) -> Complex64) -> Operator {
    let n = eig.vectors.first().map(|v| v.dim()).unwrap_or(1);
    let mut out = Operator::zeros(n);
    for (e, vec) in eig.values.iter().zip(&eig.vectors) {
        out += &(Operator::outer(vec, vec) * f(*e));
    }
    out
}
