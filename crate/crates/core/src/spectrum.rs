//! Power spectra of sampled real signals, peak picking and line labelling.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample spacing must be positive, got {dt}")));
        }
        if values.len() < 2 {
            return Err(Error::BadLength(values.len()));
        }
        Ok(Self { dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Angular frequencies `2 pi k / (N dt)`, `k = 0 ..= N/2`.
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub bin_width: f64,
}

/// One-sided power spectrum with a rectangular window.
///
/// Normalised so that `sum(power) == sum(values^2)`.
pub fn power_spectrum(series: &TimeSeries) -> Result<SpectrumResult> {
    let n = series.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadLength(n));
    }
    let mut buf: Vec<Complex<f64>> = series.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let bin_width = 2.0 * PI / (n as f64 * series.dt);
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() / n as f64;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let freqs = (0..=half).map(|k| k as f64 * bin_width).collect();
    Ok(SpectrumResult { freqs, power, bin_width })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum LineKind {
    /// Line at `order * omega_L` with `order` odd.
    OddHarmonic { order: u32 },
    /// Line at `|omega_0R + sign * 2 n omega_L|`; `n = 0` is the renormalised gap itself.
    HyperRaman { n: u32, sign: i8 },
    Unclassified,
}

impl LineKind {
    pub fn label(&self) -> String {
        match self {
            LineKind::OddHarmonic { order } => format!("odd-harmonic,{order}"),
            LineKind::HyperRaman { n, sign } => format!("hyper-raman,{}{n}", if *sign < 0 { "-" } else { "+" }),
            LineKind::Unclassified => "unclassified,".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    /// Refined angular frequency.
    pub frequency: f64,
    pub bin: usize,
    pub height: f64,
    pub kind: LineKind,
}

/// Strict local maxima with power at least `rel_threshold` times the global maximum.
///
/// The end bins are never reported. Centers are refined from the magnitude
/// ratio of the peak bin and its larger neighbour, which is exact for a lone
/// tone under a rectangular window.
pub fn detect_peaks(spec: &SpectrumResult, rel_threshold: f64) -> Result<Vec<Peak>> {
    let p = &spec.power;
    if p.len() < 3 {
        return Err(Error::EmptySpectrum);
    }
    if !(rel_threshold > 0.0 && rel_threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!("threshold must lie in (0, 1], got {rel_threshold}")));
    }
    let max = p.iter().cloned().fold(0.0, f64::max);
    let floor = rel_threshold * max;
    let mut peaks = Vec::new();
    for k in 1..p.len() - 1 {
        if p[k] > p[k - 1] && p[k] > p[k + 1] && p[k] >= floor && p[k] > 0.0 {
            let (left, centre, right) = (p[k - 1].sqrt(), p[k].sqrt(), p[k + 1].sqrt());
            let offset = if right >= left { right / (centre + right) } else { -left / (centre + left) };
            peaks.push(Peak {
                frequency: spec.freqs[k] + offset * spec.bin_width,
                bin: k,
                height: p[k],
                kind: LineKind::Unclassified,
            });
        }
    }
    Ok(peaks)
}

/// Labels each peak with the nearest expected line within one bin.
pub fn classify_lines(peaks: &[Peak], omega_l: f64, omega0r: f64, bin: f64) -> Vec<Peak> {
    peaks
        .iter()
        .map(|peak| {
            let mut best: Option<(f64, LineKind)> = None;
            let mut consider = |target: f64, kind: LineKind| {
                let dist = (peak.frequency - target).abs();
                if dist <= bin && best.map(|(d, _)| dist < d).unwrap_or(true) {
                    best = Some((dist, kind));
                }
            };
            let top = (peak.frequency / omega_l).ceil() as u32 + 1;
            let mut order = 1;
            while order <= top {
                consider(order as f64 * omega_l, LineKind::OddHarmonic { order });
                order += 2;
            }
            consider(omega0r.abs(), LineKind::HyperRaman { n: 0, sign: 1 });
            for n in 1..=top / 2 + 1 {
                let shift = 2.0 * n as f64 * omega_l;
                consider((omega0r + shift).abs(), LineKind::HyperRaman { n, sign: 1 });
                consider((omega0r - shift).abs(), LineKind::HyperRaman { n, sign: -1 });
            }
            Peak { kind: best.map(|(_, k)| k).unwrap_or(LineKind::Unclassified), ..*peak }
        })
        .collect()
}
