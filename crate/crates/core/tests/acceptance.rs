//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `harness = false`. The process fails if any criterion fails
//! except those listed in `UNATTAINABLE`, which are still executed and
//! reported as FAIL.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dualdyson::cli::{parse_config, Model};
use dualdyson::engine::{adiabatic_propagator, berry_phases, dual_dyson_propagate, dyson_propagate, instantaneous_frames};
use dualdyson::hhg::{
    bessel_identity_residual, dipole_components, hhg_interaction_hamiltonian, hhg_leading_propagator, hhg_spectral_grid,
    HhgParams, Picture, Populations,
};
use dualdyson::jc::{
    jc_dual_closed, jc_dyson_closed, jc_exact, jc_exact_propagator, jc_leading_propagator, jc_sector_hamiltonian,
    JcAmplitudes, JcParams,
};
use dualdyson::ode::{integrate_to_points, OdeOptions};
use dualdyson::spectrum::{classify_lines, detect_peaks, power_spectrum, LineKind, SpectrumResult, TimeSeries, DEFAULT_THRESHOLD};
use dualdyson::wkbj::{wkbj_closed, wkbj_matrix_propagator, wkbj_relative_error, WkbjProblem};
use dualdyson::{Operator, TimeGrid};

/// Criteria that are run and reported but expected to fail.
const UNATTAINABLE: &[u32] = &[4];

const SEED: u64 = 20240611;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}

fn random_amplitudes(rng: &mut ChaCha8Rng) -> JcAmplitudes {
    let mut r = || rng.gen_range(-1.0..1.0);
    JcAmplitudes::new(Complex64::new(r(), r()), Complex64::new(r(), r())).normalized()
}

fn within_time(limit: Duration, start: Instant) -> (bool, String) {
    let used = start.elapsed();
    (used < limit, format!("{:.2}s/{:.0}s", used.as_secs_f64(), limit.as_secs_f64()))
}

// Criterion 1: closed-form JC amplitudes vs adaptive ODE integration.
fn exact_solution_oracle() -> Outcome {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let omega = rng.gen_range(0.5..2.0);
        let detuning = rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let g = rng.gen_range(0.05..0.5);
        let n = rng.gen_range(0..6u32);
        let p = JcParams::new(omega, omega + detuning, g, n);
        let init = random_amplitudes(&mut rng);
        let ts = linspace(0.0, 20.0 * PI / p.generalized_rabi(), 200);
        let f = |s: f64, y: &[Complex64]| {
            let h = jc_sector_hamiltonian(&p, s);
            let i = Complex64::i();
            vec![-i * (h[(0, 0)] * y[0] + h[(0, 1)] * y[1]), -i * (h[(1, 0)] * y[0] + h[(1, 1)] * y[1])]
        };
        let ys = integrate_to_points(f, 0.0, &[init.c1, init.c2], &ts, OdeOptions::with_tol(1e-13)).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            worst = worst.max(jc_exact(&p, &init, *t).max_abs_diff(&JcAmplitudes::new(y[0], y[1])));
        }
    }
    let (fast, time) = within_time(Duration::from_secs(5), start);
    outcome(worst <= TOL && fast, format!("max error {worst:.2e} (tol {TOL:.0e}), {time}"))
}

fn weak_error(lam: f64, order: u32, resummed: bool, t_max: f64) -> f64 {
    let p = JcParams::from_detuning(1.0, lam);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let inits = [JcAmplitudes::new(c(1.0), c(0.0)), random_amplitudes(&mut rng)];
    let mut worst = 0.0f64;
    for init in &inits {
        for t in linspace(0.0, t_max, 401) {
            let approx = jc_dyson_closed(&p, init, t, order, resummed).unwrap();
            worst = worst.max(approx.max_abs_diff(&jc_exact(&p, init, t)));
        }
    }
    worst
}

// Criterion 2: weak-coupling error slopes (order 1 plain, order 2 resummed).
fn dyson_order_scaling() -> Outcome {
    const TOL: f64 = 0.3;
    let start = Instant::now();
    let lams = [0.05, 0.1, 0.2];
    let t_max = 20.0;
    let s1 = slope(&lams, &lams.map(|l| weak_error(l, 1, false, t_max)));
    let s2 = slope(&lams, &lams.map(|l| weak_error(l, 2, true, t_max)));
    let (fast, time) = within_time(Duration::from_secs(10), start);
    let pass = (s1 - 2.0).abs() <= TOL && (s2 - 3.0).abs() <= TOL && fast;
    outcome(pass, format!("slopes order1 {s1:.3} (want 2), order2 resummed {s2:.3} (want 3), {time}"))
}

// Criterion 3: strong-coupling error slopes vs 1/lambda.
fn dual_order_scaling() -> Outcome {
    const TOL: f64 = 0.3;
    let start = Instant::now();
    let lams = [5.0, 10.0, 20.0];
    let inv: Vec<f64> = lams.iter().map(|l| 1.0 / l).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let inits = [JcAmplitudes::new(c(0.6), c(0.8)), random_amplitudes(&mut rng)];
    let mut pass = true;
    let mut parts = Vec::new();
    for order in 0..=2u32 {
        let errs: Vec<f64> = lams
            .iter()
            .map(|&lam| {
                let p = JcParams::from_detuning(1.0 / lam, 1.0);
                let mut worst = 0.0f64;
                for init in &inits {
                    for t in linspace(0.0, 6.0 * PI / p.rabi(), 401) {
                        let approx = jc_dual_closed(&p, init, t, order).unwrap();
                        worst = worst.max(approx.max_abs_diff(&jc_exact(&p, init, t)));
                    }
                }
                worst
            })
            .collect();
        let s = slope(&inv, &errs);
        pass &= (s - (order as f64 + 1.0)).abs() <= TOL;
        parts.push(format!("order{order} {s:.3}"));
    }
    let (fast, time) = within_time(Duration::from_secs(10), start);
    outcome(pass && fast, format!("slopes {} (want order+1), {time}", parts.join(", ")))
}

// Criterion 4: secular growth of the plain second-order error, removed by resummation.
fn secularity() -> Outcome {
    let start = Instant::now();
    let p = JcParams::from_detuning(1.0, 0.1);
    let init = JcAmplitudes::new(c(1.0), c(0.0));
    let err = |t: f64, resummed: bool| jc_dyson_closed(&p, &init, t, 2, resummed).unwrap().max_abs_diff(&jc_exact(&p, &init, t));
    // amplitude error is the max over [0, t]
    let window = |t_end: f64, resummed: bool| linspace(0.0, t_end, 2001).into_iter().map(|t| err(t, resummed)).fold(0.0, f64::max);
    let plain = window(200.0, false) / window(20.0, false);
    let resummed = window(200.0, true) / window(20.0, true);
    let (fast, time) = within_time(Duration::from_secs(5), start);
    let pass = plain >= 5.0 && resummed < 1.5 && fast;
    outcome(pass, format!("plain growth {plain:.2}x (want >= 5), resummed growth {resummed:.2}x (want < 1.5), {time}"))
}

// Criterion 5: numerical series engines vs the JC closed forms on 4096 nodes.
fn engine_vs_closed_form() -> Outcome {
    const TOL: f64 = 1e-6;
    let start = Instant::now();
    let inits = [JcAmplitudes::new(c(1.0), c(0.0)), JcAmplitudes::new(c(0.0), c(1.0)), JcAmplitudes::new(c(0.6), Complex64::new(0.0, 0.8))];
    let compare = |series: &dualdyson::PropagatorSeries, closed: &dyn Fn(&JcAmplitudes, f64, u32) -> JcAmplitudes| {
        let mut worst = 0.0f64;
        for order in 0..=series.max_order() {
            for (t, u) in series.times.iter().zip(series.order(order)) {
                for init in &inits {
                    let num = JcAmplitudes::from_state(&u.apply(&init.to_state())).unwrap();
                    worst = worst.max(num.max_abs_diff(&closed(init, *t, order as u32)));
                }
            }
        }
        worst
    };
    let weak = JcParams::from_detuning(1.0, 0.2);
    let grid = TimeGrid::new(0.0, 10.0, 4096).unwrap();
    let series = dyson_propagate(|t| jc_sector_hamiltonian(&weak, t), &grid, 2).unwrap();
    let e_dyson = compare(&series, &|i, t, k| jc_dyson_closed(&weak, i, t, k, false).unwrap());
    let strong = JcParams::from_detuning(0.1, 1.0);
    let grid = TimeGrid::new(0.0, 6.0 * PI, 4096).unwrap();
    let series = dual_dyson_propagate(|t| jc_sector_hamiltonian(&strong, t), &grid, 2).unwrap();
    let e_dual = compare(&series, &|i, t, k| jc_dual_closed(&strong, i, t, k).unwrap());
    let (fast, time) = within_time(Duration::from_secs(30), start);
    outcome(
        e_dyson <= TOL && e_dual <= TOL && fast,
        format!("dyson orders 0-2 {e_dyson:.2e}, dual orders 0-2 {e_dual:.2e} (tol {TOL:.0e}), {time}"),
    )
}

fn berry_defect(phases: &[Vec<f64>], times: &[f64], rates: [f64; 2]) -> f64 {
    let mut worst = 0.0f64;
    for (branch, rate) in rates.iter().enumerate() {
        for (k, t) in times.iter().enumerate().skip(1) {
            let expected = rate * t;
            worst = worst.max((phases[branch][k] - expected).abs() / expected.abs());
        }
    }
    worst
}

// Criterion 6: integrated Berry connections equal the analytic phases.
fn berry_phase_check() -> Outcome {
    const TOL: f64 = 1e-8;
    let jc = JcParams::from_detuning(0.8, 0.5);
    let grid = TimeGrid::new(0.0, 10.0, 4096).unwrap();
    let frames = instantaneous_frames(|t| jc_sector_hamiltonian(&jc, t), &grid, None).unwrap();
    // ascending eigenvalues: JC branch 0 is the -g state
    let d = jc.detuning();
    let e_jc = berry_defect(&berry_phases(&frames), &grid.times(), [-d / 2.0, d / 2.0]);
    let hhg = HhgParams::from_z(0.1, 1.0, 1.5, 1.0).unwrap();
    let grid = TimeGrid::new(0.0, 3.0, 4096).unwrap();
    let frames = instantaneous_frames(|t| hhg_interaction_hamiltonian(&hhg, t), &grid, None).unwrap();
    let w0 = hhg.omega0;
    let e_hhg = berry_defect(&berry_phases(&frames), &grid.times(), [w0 / 2.0, -w0 / 2.0]);
    outcome(e_jc <= TOL && e_hhg <= TOL, format!("relative defect JC {e_jc:.2e}, HHG {e_hhg:.2e} (tol {TOL:.0e})"))
}

// Criterion 7: Bessel expansion of the driven exponential.
fn bessel_identity() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for z in [0.5, 1.0, 2.0, 5.0] {
        let cutoff = (z + 20.0f64).ceil() as usize;
        for k in 0..100 {
            let phi = 2.0 * PI * k as f64 / 100.0;
            worst = worst.max(bessel_identity_residual(z, phi, cutoff).unwrap());
        }
    }
    outcome(worst <= TOL, format!("max residual {worst:.2e} (tol {TOL:.0e})"))
}

fn hhg_spectrum(p: &HhgParams, init: &Populations) -> (SpectrumResult, Vec<f64>) {
    let grid = hhg_spectral_grid(p, 256, 64).unwrap();
    let comps = dipole_components(p, init, &grid);
    let x: Vec<f64> = (0..comps.times.len()).map(|k| -p.dipole * (comps.carrier[k] + comps.odd_harmonic[k] + comps.hyper_raman[k])).collect();
    let odd: Vec<f64> = comps.odd_harmonic.iter().map(|v| -p.dipole * v).collect();
    (power_spectrum(&TimeSeries::new(grid.spacing(), x).unwrap()).unwrap(), odd)
}

// Criterion 8: line content of the spectrum for ground and balanced initial states.
fn spectrum_structure() -> Outcome {
    let start = Instant::now();
    let p = HhgParams::from_z(0.1, 1.0, 1.5, 1.0).unwrap();
    let w0r = p.omega0_r();
    let classify = |spec: &SpectrumResult| {
        classify_lines(&detect_peaks(spec, DEFAULT_THRESHOLD).unwrap(), p.omega_l, w0r, spec.bin_width)
    };
    let (spec, _) = hhg_spectrum(&p, &Populations::ground());
    let ground = classify(&spec);
    let ground_ok = ground.iter().all(|pk| matches!(pk.kind, LineKind::OddHarmonic { .. } | LineKind::HyperRaman { n: 0, .. }));
    let (spec, _) = hhg_spectrum(&p, &Populations::balanced());
    let balanced = classify(&spec);
    let mut worst = 0.0f64;
    let balanced_ok = balanced.iter().all(|pk| match pk.kind {
        LineKind::HyperRaman { n, sign } => {
            let expected = (w0r + sign as f64 * 2.0 * n as f64 * p.omega_l).abs();
            let off = (pk.frequency - expected).abs() / spec.bin_width;
            worst = worst.max(off);
            off < 1.0
        }
        _ => false,
    });
    let (fast, time) = within_time(Duration::from_secs(10), start);
    outcome(
        ground_ok && balanced_ok && fast && !ground.is_empty() && balanced.len() >= 3,
        format!(
            "ground: {} peaks all odd/carrier = {ground_ok}; balanced: {} peaks all hyper-Raman = {balanced_ok}, max offset {worst:.3} bin, {time}",
            ground.len(),
            balanced.len()
        ),
    )
}

// Criterion 9: hyper-Raman line centres follow the renormalised gap as z varies.
fn shift_law() -> Outcome {
    // the lines sit far below the carrier, so detection uses a low threshold
    const THRESHOLD: f64 = 1e-11;
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut missing = Vec::new();
    for z in [0.5, 1.0, 1.5, 2.0] {
        let p = HhgParams::from_z(0.1, 1.0, z, 1.0).unwrap();
        let (spec, _) = hhg_spectrum(&p, &Populations::balanced());
        let peaks = detect_peaks(&spec, THRESHOLD).unwrap();
        // independent gap: J0 from its integral representation
        let w0r = p.omega0 * bessel_quadrature(0, z);
        for n in 1..=2 {
            for sign in [-1.0, 1.0] {
                let expected = (w0r + sign * 2.0 * n as f64 * p.omega_l).abs();
                let nearest = peaks.iter().map(|pk| (pk.frequency - expected).abs()).fold(f64::INFINITY, f64::min) / spec.bin_width;
                if nearest < 1.0 {
                    worst = worst.max(nearest);
                } else {
                    missing.push(format!("z={z} n={n} sign={sign}"));
                }
            }
        }
    }
    let (fast, time) = within_time(Duration::from_secs(30), start);
    outcome(
        missing.is_empty() && fast,
        format!("16 lines, max offset {worst:.3} bin, missing [{}], {time}", missing.join("; ")),
    )
}

/// `J_n(z) = (1/pi) int_0^pi cos(n tau - z sin tau) dtau`; the trapezoid rule is spectrally accurate here.
fn bessel_quadrature(n: u32, z: f64) -> f64 {
    let m = 2000;
    let h = PI / m as f64;
    let f = |tau: f64| (n as f64 * tau - z * tau.sin()).cos();
    let inner: f64 = (1..m).map(|k| f(k as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) * h / PI
}

// Criterion 10: odd-harmonic magnitudes scale as J_{2n+1}(z) / ((n + 1/2) omegaL).
fn harmonic_amplitude_law() -> Outcome {
    const TOL: f64 = 0.01;
    let p = HhgParams::from_z(0.1, 1.0, 1.5, 1.0).unwrap();
    let (_, odd) = hhg_spectrum(&p, &Populations::ground());
    let grid = hhg_spectral_grid(&p, 256, 64).unwrap();
    let spec = power_spectrum(&TimeSeries::new(grid.spacing(), odd).unwrap()).unwrap();
    let ratios: Vec<f64> = (0..4u32)
        .map(|n| {
            let bin = (2 * n + 1) as usize * 256;
            let law = bessel_quadrature(2 * n + 1, p.z()) / ((n as f64 + 0.5) * p.omega_l);
            spec.power[bin].sqrt() / law.abs()
        })
        .collect();
    let spread = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    outcome(spread <= TOL, format!("magnitude/law ratios spread {spread:.2e} across n = 0..3 (tol {TOL})"))
}

// Criterion 11: WKBJ error is linear in the slowness parameter.
fn wkbj_check() -> Outcome {
    const SLOPE_TOL: f64 = 0.3;
    const MATRIX_TOL: f64 = 1e-10;
    let eps = [0.04, 0.02, 0.01];
    let (psi0, phi0) = (c(0.8), c(-0.3));
    let errs: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let prob = WkbjProblem::new(move |x: f64| (1.0 + e * x).sqrt(), 0.0, 10.0, psi0, phi0).unwrap();
            wkbj_relative_error(&prob, 401, 1e-12).unwrap()
        })
        .collect();
    let s = slope(&eps, &errs);
    let mut matrix = 0.0f64;
    for &e in &eps {
        let prob = WkbjProblem::new(move |x: f64| (1.0 + e * x).sqrt(), 0.0, 10.0, psi0, phi0).unwrap();
        for x in linspace(0.0, 10.0, 101) {
            let u = wkbj_matrix_propagator(&prob, x).unwrap();
            let psi = u[(0, 0)] * psi0 + u[(0, 1)] * phi0;
            matrix = matrix.max((psi - wkbj_closed(&prob, x).unwrap()).norm());
        }
    }
    outcome(
        (s - 1.0).abs() <= SLOPE_TOL && matrix <= MATRIX_TOL,
        format!("error slope {s:.3} (want 1), matrix vs closed form {matrix:.2e} (tol {MATRIX_TOL:.0e})"),
    )
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn shipped_configs() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .expect("configs directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

// Criterion 12: U_A, U_0 and exact propagators are unitary for every shipped parameter set.
fn unitarity_suite() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut track = |u: &Operator| {
        worst = worst.max(u.unitarity_defect());
        count += 1;
    };
    let mut jcs = Vec::new();
    let mut hhgs = Vec::new();
    for path in shipped_configs() {
        let cfg = parse_config(&std::fs::read_to_string(&path).unwrap()).unwrap();
        match cfg.model {
            Model::Jc(s) => jcs.push((s.params, s.t1)),
            Model::Hhg(s) => hhgs.push(s.params),
            Model::Sweep(s) => hhgs.extend(s.values.iter().map(|v| s.point(*v).unwrap().params)),
            Model::Wkbj(_) => {}
        }
    }
    for (p, t1) in &jcs {
        let grid = TimeGrid::new(0.0, *t1, 1024).unwrap();
        for t in grid.times() {
            track(&jc_exact_propagator(p, t));
            track(&jc_leading_propagator(p, t));
        }
        let frames = instantaneous_frames(|t| jc_sector_hamiltonian(p, t), &grid, None).unwrap();
        adiabatic_propagator(&frames).iter().for_each(&mut track);
    }
    for p in &hhgs {
        let grid = TimeGrid::new(0.0, 8.0 * PI / p.omega_l, 1024).unwrap();
        for t in grid.times() {
            track(&hhg_leading_propagator(p, t, Picture::Schrodinger));
            track(&hhg_leading_propagator(p, t, Picture::Interaction));
        }
        let frames = instantaneous_frames(|t| hhg_interaction_hamiltonian(p, t), &grid, None).unwrap();
        adiabatic_propagator(&frames).iter().for_each(&mut track);
    }
    let sets = jcs.len() + hhgs.len();
    outcome(
        worst <= TOL && sets > 0,
        format!("{count} propagators over {sets} parameter sets, max defect {worst:.2e} (tol {TOL:.0e})"),
    )
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

// Criterion 13: identical configs give byte-identical artifacts.
fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_dualdyson");
    let tmp = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    let configs = shipped_configs();
    for path in &configs {
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let runs: Vec<Vec<(String, Vec<u8>)>> = (0..2)
            .map(|k| {
                let out = tmp.path().join(format!("{stem}-{k}"));
                let status = Command::new(exe).arg(path).arg("--out").arg(&out).output().unwrap().status;
                assert!(status.success(), "{stem} exited with {status}");
                dir_bytes(&out)
            })
            .collect();
        if runs[0].is_empty() || runs[0] != runs[1] {
            mismatched.push(stem);
        }
    }
    outcome(
        mismatched.is_empty() && !configs.is_empty(),
        format!("{} configs run twice, mismatched [{}]", configs.len(), mismatched.join(", ")),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "exact-solution oracle", exact_solution_oracle),
        (2, "Dyson order scaling", dyson_order_scaling),
        (3, "dual order scaling", dual_order_scaling),
        (4, "secularity", secularity),
        (5, "engine vs closed form", engine_vs_closed_form),
        (6, "Berry phases", berry_phase_check),
        (7, "Bessel operator identity", bessel_identity),
        (8, "HHG spectrum structure", spectrum_structure),
        (9, "hyper-Raman shift law", shift_law),
        (10, "harmonic amplitude law", harmonic_amplitude_law),
        (11, "WKBJ", wkbj_check),
        (12, "unitarity", unitarity_suite),
        (13, "determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, check) in criteria {
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && UNATTAINABLE.contains(&id) { " [known unattainable]" } else { "" };
        println!("{status} {id:>2} {name}: {}{note}", o.detail);
        if o.pass {
            passed += 1;
        } else if note.is_empty() {
            unexpected.push(id);
        }
    }
    println!("{passed}/{} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
