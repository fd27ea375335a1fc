//! Experiment orchestration and file output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ConfigError, HhgSettings, JcSettings, Model, RunConfig, SweepSettings, WkbjSettings};
use crate::engine::TimeGrid;
use crate::error::Error;
use crate::hhg::{dipole_components, dipole_cross_check, dipole_from_state, hhg_spectral_grid, Picture};
use crate::jc::{jc_dual_closed, jc_dyson_closed, jc_exact};
use crate::spectrum::{classify_lines, detect_peaks, power_spectrum, LineKind, Peak, SpectrumResult, TimeSeries};
use crate::wkbj::{reference_solve_points, wkbj_closed, WkbjProblem};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

const REFERENCE_TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) => EXIT_NUMERICAL,
            RunError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

/// 17 significant digits, enough to round-trip an f64.
fn num(x: f64) -> RunResult<String> {
    if !x.is_finite() {
        return Err(RunError::Numerical(Error::InvalidArgument("non-finite value in output".into())));
    }
    Ok(format!("{x:.16e}"))
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    fn numbers(&mut self, values: &[f64]) -> RunResult<()> {
        let cells = values.iter().map(|v| num(*v)).collect::<RunResult<Vec<_>>>()?;
        self.row(&cells);
        Ok(())
    }
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> RunResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Value) -> RunResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| RunError::Io(e.to_string()))?;
        text.push('\n');
        self.put(name, &text)
    }
}

/// Runs the configured experiment, writing every artifact into `out`.
pub fn run(config: &RunConfig, out: &Path) -> RunResult<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| RunError::Io(format!("{}: {e}", out.display())))?;
    let mut w = Writer { dir: out, written: Vec::new() };
    let name = config.experiment.name();
    let summary = match &config.model {
        Model::Jc(s) => run_jc(s, name, &mut w)?,
        Model::Hhg(s) => run_hhg(s, name, &mut w)?,
        Model::Wkbj(s) => run_wkbj(s, name, &mut w)?,
        Model::Sweep(s) => run_sweep(s, name, &mut w)?,
    };
    w.json(&format!("{name}.json"), &json!({ "experiment": name, "config": config.source, "summary": summary }))?;
    w.put("plot.gp", &plot_script(config))?;
    Ok(w.written)
}

fn run_jc(s: &JcSettings, name: &str, w: &mut Writer) -> RunResult<Value> {
    let p = &s.params;
    let lambda = p.lambda()?;
    let with_dual = p.rabi() != 0.0;
    let grid = TimeGrid::new(0.0, s.t1, s.samples)?;
    let mut header = vec!["t", "err_order0", "err_order1", "err_order2", "err_order2_resummed"];
    if with_dual {
        header.extend(["err_dual0", "err_dual1", "err_dual2"]);
    }
    let mut csv = Csv::new(&header);
    let mut worst = vec![0.0f64; header.len() - 1];
    for t in grid.times() {
        let exact = jc_exact(p, &s.init, t);
        let mut row = vec![t];
        for order in 0..=2 {
            row.push(jc_dyson_closed(p, &s.init, t, order, false)?.max_abs_diff(&exact));
        }
        row.push(jc_dyson_closed(p, &s.init, t, 2, true)?.max_abs_diff(&exact));
        if with_dual {
            for order in 0..=2 {
                row.push(jc_dual_closed(p, &s.init, t, order)?.max_abs_diff(&exact));
            }
        }
        for (m, v) in worst.iter_mut().zip(&row[1..]) {
            *m = m.max(*v);
        }
        csv.numbers(&row)?;
    }
    w.put(&format!("{name}.csv"), &csv.text)?;
    let max_errors: serde_json::Map<String, Value> =
        header[1..].iter().zip(&worst).map(|(h, v)| (h.to_string(), json!(v))).collect();
    Ok(json!({
        "detuning": p.detuning(),
        "rabiFrequency": p.rabi(),
        "generalizedRabiFrequency": p.generalized_rabi(),
        "lambda": lambda,
        "samples": s.samples,
        "t1": s.t1,
        "maxErrors": max_errors,
    }))
}

struct SpectrumRun {
    series: TimeSeries,
    spectrum: SpectrumResult,
    peaks: Vec<Peak>,
    max_imaginary: f64,
}

fn spectrum_run(s: &HhgSettings) -> RunResult<SpectrumRun> {
    let grid = hhg_spectral_grid(&s.params, s.periods, s.samples_per_period)?;
    let comps = dipole_components(&s.params, &s.init, &grid);
    let series = match s.picture {
        Picture::Schrodinger => {
            let d = s.params.dipole;
            let values = (0..comps.times.len())
                .map(|k| -d * (comps.carrier[k] + comps.odd_harmonic[k] + comps.hyper_raman[k]))
                .collect();
            TimeSeries::new(grid.spacing(), values)?
        }
        Picture::Interaction => dipole_from_state(&s.params, &s.init, &grid, Picture::Interaction)?,
    };
    let spectrum = power_spectrum(&series)?;
    let mut peaks = classify_lines(
        &detect_peaks(&spectrum, s.threshold)?,
        s.params.omega_l,
        s.params.omega0_r(),
        spectrum.bin_width,
    );
    peaks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    Ok(SpectrumRun { series, spectrum, peaks, max_imaginary: comps.max_imaginary })
}

fn peak_cells(p: &Peak) -> RunResult<Vec<String>> {
    let label = p.kind.label();
    let (kind, order) = label.split_once(',').unwrap_or((label.as_str(), ""));
    Ok(vec![num(p.frequency)?, num(p.height)?, kind.to_string(), order.to_string()])
}

fn kind_counts(peaks: &[Peak]) -> Value {
    let odd = peaks.iter().filter(|p| matches!(p.kind, LineKind::OddHarmonic { .. })).count();
    let hr = peaks.iter().filter(|p| matches!(p.kind, LineKind::HyperRaman { .. })).count();
    let other = peaks.len() - odd - hr;
    json!({ "oddHarmonic": odd, "hyperRaman": hr, "unclassified": other })
}

fn run_hhg(s: &HhgSettings, name: &str, w: &mut Writer) -> RunResult<Value> {
    let r = spectrum_run(s)?;
    let mut signal = Csv::new(&["t", "x"]);
    for (k, v) in r.series.values.iter().enumerate() {
        signal.numbers(&[k as f64 * r.series.dt, *v])?;
    }
    w.put(&format!("{name}-signal.csv"), &signal.text)?;
    let mut spec = Csv::new(&["freq", "power"]);
    for (f, p) in r.spectrum.freqs.iter().zip(&r.spectrum.power) {
        spec.numbers(&[*f, *p])?;
    }
    w.put(&format!("{name}.csv"), &spec.text)?;
    let mut peaks = Csv::new(&["freq", "height", "kind", "order"]);
    for p in &r.peaks {
        peaks.row(&peak_cells(p)?);
    }
    w.put(&format!("{name}-peaks.csv"), &peaks.text)?;
    let grid = hhg_spectral_grid(&s.params, s.periods, s.samples_per_period)?;
    let residual = dipole_cross_check(&s.params, &s.init, &grid, Picture::Schrodinger)?;
    Ok(json!({
        "omega0R": s.params.omega0_r(),
        "z": s.params.z(),
        "zHalf": s.params.z_half(),
        "binWidth": r.spectrum.bin_width,
        "samples": r.series.len(),
        "threshold": s.threshold,
        "picture": s.picture,
        "peakCount": r.peaks.len(),
        "peakKinds": kind_counts(&r.peaks),
        "maxImaginaryPart": r.max_imaginary,
        "stateCrossCheckResidual": residual,
    }))
}

fn run_sweep(s: &SweepSettings, name: &str, w: &mut Writer) -> RunResult<Value> {
    let runs: Vec<RunResult<(HhgSettings, SpectrumRun)>> = s
        .values
        .par_iter()
        .map(|&v| {
            let point = s.point(v)?;
            let r = spectrum_run(&point)?;
            Ok((point, r))
        })
        .collect();
    let mut table = Csv::new(&["value", "omega0R", "n", "sign", "expected", "measured", "offset_bins"]);
    let mut all = Csv::new(&["value", "freq", "height", "kind", "order"]);
    let mut points = Vec::new();
    for (&value, run) in s.values.iter().zip(runs) {
        let (point, r) = run?;
        let w0r = point.params.omega0_r();
        let mut worst = 0.0f64;
        for p in &r.peaks {
            let mut cells = vec![num(value)?];
            cells.extend(peak_cells(p)?);
            all.row(&cells);
            if let LineKind::HyperRaman { n, sign } = p.kind {
                let expected = (w0r + sign as f64 * 2.0 * n as f64 * point.params.omega_l).abs();
                let offset = (p.frequency - expected) / r.spectrum.bin_width;
                worst = worst.max(offset.abs());
                table.row(&[num(value)?, num(w0r)?, n.to_string(), sign.to_string(), num(expected)?, num(p.frequency)?, num(offset)?]);
            }
        }
        points.push(json!({
            "value": value,
            "omega0R": w0r,
            "z": point.params.z(),
            "peakKinds": kind_counts(&r.peaks),
            "maxHyperRamanOffsetBins": worst,
        }));
    }
    w.put(&format!("{name}.csv"), &table.text)?;
    w.put(&format!("{name}-peaks.csv"), &all.text)?;
    Ok(json!({ "parameter": s.parameter.name(), "points": points }))
}

fn run_wkbj(s: &WkbjSettings, name: &str, w: &mut Writer) -> RunResult<Value> {
    let eps = s.epsilon;
    let problem = WkbjProblem::new(move |x: f64| (1.0 + eps * x).sqrt(), s.x0, s.x1, s.psi0, s.phi0)?;
    let n = s.samples;
    let xs: Vec<f64> = (0..n).map(|k| if k + 1 == n { s.x1 } else { s.x0 + (s.x1 - s.x0) * k as f64 / (n - 1) as f64 }).collect();
    let reference = reference_solve_points(&problem, &xs, REFERENCE_TOL)?;
    let mut csv = Csv::new(&["x", "psi_wkbj_re", "psi_wkbj_im", "psi_ref_re", "psi_ref_im", "abs_err"]);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (x, (psi, _)) in xs.iter().zip(&reference) {
        let approx: Complex64 = wkbj_closed(&problem, *x)?;
        let err = (approx - psi).norm();
        worst = worst.max(err);
        scale = scale.max(psi.norm());
        csv.numbers(&[*x, approx.re, approx.im, psi.re, psi.im, err])?;
    }
    w.put(&format!("{name}.csv"), &csv.text)?;
    Ok(json!({
        "epsilon": eps,
        "samples": n,
        "maxAbsError": worst,
        "relativeError": if scale > 0.0 { worst / scale } else { 0.0 },
    }))
}

fn plot_script(config: &RunConfig) -> String {
    let name = config.experiment.name();
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
    match &config.model {
        Model::Jc(jc) => {
            s.push_str("set logscale y\nset xlabel 't'\nset ylabel 'max amplitude error'\n");
            let last = if jc.params.rabi() != 0.0 { 8 } else { 5 };
            let series: Vec<String> = (2..=last).map(|c| format!("'{name}.csv' using 1:{c} with lines")).collect();
            s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
        }
        Model::Hhg(_) => {
            s.push_str("set logscale y\nset xlabel 'omega'\nset ylabel 'power'\n");
            s.push_str(&format!("plot '{name}.csv' using 1:2 with lines, \\\n     '{name}-peaks.csv' using 1:2 with points pt 7\n"));
        }
        Model::Sweep(sw) => {
            s.push_str(&format!("set xlabel '{}'\nset ylabel 'line center'\n", sw.parameter.name()));
            s.push_str(&format!("plot '{name}.csv' using 1:6 with points pt 7 title 'measured', \\\n     '{name}.csv' using 1:5 with lines title 'expected'\n"));
        }
        Model::Wkbj(_) => {
            s.push_str("set xlabel 'x'\nset ylabel 'psi'\n");
            s.push_str(&format!("plot '{name}.csv' using 1:2 with lines title 'WKBJ', \\\n     '{name}.csv' using 1:4 with lines title 'reference'\n"));
        }
    }
    s
}
