//! Integer-order Bessel functions of the first kind.
//!
//! Small arguments use the power series; larger ones use Miller's downward
//! recurrence normalised with `J_0 + 2 sum J_2k = 1`.

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 64;

/// Below this argument the power series is used.
const SERIES_LIMIT: f64 = 12.0;

/// `J_n(z)` for `0 <= n <= 64`.
pub fn bessel_j(order: u32, z: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    if z < 0.0 {
        let v = bessel_j(order, -z)?;
        return Ok(if order % 2 == 1 { -v } else { v });
    }
    if z == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    if z <= SERIES_LIMIT {
        Ok(series(order, z))
    } else {
        Ok(miller(order as usize, z)[order as usize])
    }
}

/// `J_0(z) .. J_max(z)`.
pub fn bessel_sequence(max: u32, z: f64) -> Result<Vec<f64>> {
    (0..=max).map(|n| bessel_j(n, z)).collect()
}

/// Smallest `k > z + 10` with `|J_k(z)| < 1e-14`, capped at [`MAX_ORDER`].
pub fn truncation_order(z: f64) -> u32 {
    let start = (z.abs() + 10.0).floor() as u32 + 1;
    for k in start..=MAX_ORDER {
        if bessel_j(k, z).map(|v| v.abs() < 1e-14).unwrap_or(true) {
            return k;
        }
    }
    MAX_ORDER
}

fn series(order: u32, z: f64) -> f64 {
    let half = z / 2.0;
    // (z/2)^n / n!
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 2 {
            break;
        }
        if k > 500 {
            break;
        }
    }
    sum
}

fn miller(order: usize, z: f64) -> Vec<f64> {
    let start = {
        let m = order.max(z as usize) + 40 + (z.sqrt() * 10.0) as usize;
        m + (m % 2)
    };
    let mut values = vec![0.0; start + 2];
    values[start + 1] = 0.0;
    values[start] = 1e-30;
    for k in (1..=start).rev() {
        values[k - 1] = 2.0 * k as f64 / z * values[k] - values[k + 1];
        if values[k - 1].abs() > 1e250 {
            for v in values.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = values[0] + 2.0 * values.iter().skip(2).step_by(2).sum::<f64>();
    values.truncate(order.max(1) + 1);
    values.iter().map(|v| v / norm).collect()
}
