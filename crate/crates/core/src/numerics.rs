//! Uniform-grid quadrature and differentiation of sampled values.
//!
//! Both rules are fourth order: the cumulative integral integrates the local
//! cubic interpolant over each interval, and derivatives use five-point
//! stencils (centered inside, one-sided at the two nodes next to each end).
//! Short inputs fall back to lower-order rules.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::linalg::{Operator, StateVector};

/// Values that form a real vector space; enough for linear quadrature rules.
pub trait Linear: Clone + Add<Output = Self> + Mul<f64, Output = Self> {}

impl Linear for f64 {}
impl Linear for Complex64 {}
impl Linear for Operator {}
impl Linear for StateVector {}

fn combo<T: Linear>(terms: &[(f64, &T)]) -> T {
    let mut iter = terms.iter();
    let (w, v) = iter.next().expect("at least one term");
    let mut acc = (*v).clone() * *w;
    for (w, v) in iter {
        acc = acc + (*v).clone() * *w;
    }
    acc
}

/// Running integral `F[k] = int_{x_0}^{x_k} f`, with `F[0] = 0`.
pub fn cumulative_integral<T: Linear>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 1, "need at least one sample");
    let zero = f[0].clone() * 0.0;
    let mut out = Vec::with_capacity(n);
    out.push(zero);
    for j in 0..n.saturating_sub(1) {
        let piece = if n < 4 {
            combo(&[(h / 2.0, &f[j]), (h / 2.0, &f[j + 1])])
        } else if j == 0 {
            let w = h / 24.0;
            combo(&[(9.0 * w, &f[0]), (19.0 * w, &f[1]), (-5.0 * w, &f[2]), (w, &f[3])])
        } else if j == n - 2 {
            let w = h / 24.0;
            combo(&[(w, &f[n - 4]), (-5.0 * w, &f[n - 3]), (19.0 * w, &f[n - 2]), (9.0 * w, &f[n - 1])])
        } else {
            let w = h / 24.0;
            combo(&[(-w, &f[j - 1]), (13.0 * w, &f[j]), (13.0 * w, &f[j + 1]), (-w, &f[j + 2])])
        };
        let next = out[j].clone() + piece;
        out.push(next);
    }
    out
}

/// Derivative estimate at every node.
pub fn derivative<T: Linear>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 2, "need at least two samples to differentiate");
    if n == 2 {
        let d = combo(&[(1.0 / h, &f[1]), (-1.0 / h, &f[0])]);
        return vec![d.clone(), d];
    }
    if n < 5 {
        let w = 1.0 / (2.0 * h);
        return (0..n)
            .map(|k| {
                if k == 0 {
                    combo(&[(-3.0 * w, &f[0]), (4.0 * w, &f[1]), (-w, &f[2])])
                } else if k == n - 1 {
                    combo(&[(3.0 * w, &f[n - 1]), (-4.0 * w, &f[n - 2]), (w, &f[n - 3])])
                } else {
                    combo(&[(w, &f[k + 1]), (-w, &f[k - 1])])
                }
            })
            .collect();
    }
    let w = 1.0 / (12.0 * h);
    (0..n)
        .map(|k| match k {
            0 => combo(&[(-25.0 * w, &f[0]), (48.0 * w, &f[1]), (-36.0 * w, &f[2]), (16.0 * w, &f[3]), (-3.0 * w, &f[4])]),
            1 => combo(&[(-3.0 * w, &f[0]), (-10.0 * w, &f[1]), (18.0 * w, &f[2]), (-6.0 * w, &f[3]), (w, &f[4])]),
            k if k == n - 2 => combo(&[
                (3.0 * w, &f[n - 1]),
                (10.0 * w, &f[n - 2]),
                (-18.0 * w, &f[n - 3]),
                (6.0 * w, &f[n - 4]),
                (-w, &f[n - 5]),
            ]),
            k if k == n - 1 => combo(&[
                (25.0 * w, &f[n - 1]),
                (-48.0 * w, &f[n - 2]),
                (36.0 * w, &f[n - 3]),
                (-16.0 * w, &f[n - 4]),
                (3.0 * w, &f[n - 5]),
            ]),
            k => combo(&[(w, &f[k - 2]), (-8.0 * w, &f[k - 1]), (8.0 * w, &f[k + 1]), (-w, &f[k + 2])]),
        })
        .collect()
}
