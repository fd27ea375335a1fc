//! Run configuration: a single JSON document, validated by hand so that
//! unknown keys and bad values name the offending field.

use std::fmt;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::hhg::{HhgParams, Picture, Populations};
use crate::jc::{JcAmplitudes, JcParams};
use crate::spectrum::DEFAULT_THRESHOLD;

pub const DEFAULT_JC_SAMPLES: usize = 4096;
pub const DEFAULT_JC_SPAN: f64 = 200.0;
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 64;
pub const DEFAULT_PERIODS: usize = 256;
pub const DEFAULT_WKBJ_SAMPLES: usize = 401;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse(String),
    Validation { field: String, message: String },
    UnknownKey(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "malformed config: {m}"),
            ConfigError::Validation { field, message } => write!(f, "invalid value for `{field}`: {message}"),
            ConfigError::UnknownKey(k) => write!(f, "unknown key `{k}`"),
        }
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    JcCompare,
    HhgSpectrum,
    WkbjDemo,
    Sweep,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::JcCompare => "jc-compare",
            Experiment::HhgSpectrum => "hhg-spectrum",
            Experiment::WkbjDemo => "wkbj-demo",
            Experiment::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JcSettings {
    pub params: JcParams,
    pub init: JcAmplitudes,
    pub samples: usize,
    pub t1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HhgSettings {
    pub params: HhgParams,
    pub init: Populations,
    pub samples_per_period: usize,
    pub periods: usize,
    pub threshold: f64,
    pub picture: Picture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbjSettings {
    pub epsilon: f64,
    pub x0: f64,
    pub x1: f64,
    pub psi0: Complex64,
    pub phi0: Complex64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Z,
    Field,
    Omega0,
    OmegaL,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Z => "z",
            SweepParameter::Field => "field",
            SweepParameter::Omega0 => "omega0",
            SweepParameter::OmegaL => "omegaL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Base settings; the swept parameter is overwritten per point.
    pub base: HhgSettings,
}

impl SweepSettings {
    pub fn point(&self, value: f64) -> crate::Result<HhgSettings> {
        let p = self.base.params;
        let params = match self.parameter {
            SweepParameter::Z => HhgParams::from_z(p.omega0, p.omega_l, value, p.dipole)?,
            SweepParameter::Field => HhgParams::new(p.omega0, p.omega_l, value, p.dipole)?,
            SweepParameter::Omega0 => HhgParams::new(value, p.omega_l, p.field, p.dipole)?,
            SweepParameter::OmegaL => {
                // keep z fixed when the laser frequency moves
                HhgParams::from_z(p.omega0, value, p.z(), p.dipole)?
            }
        };
        Ok(HhgSettings { params, ..self.base.clone() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Jc(JcSettings),
    Hhg(HhgSettings),
    Wkbj(WkbjSettings),
    Sweep(SweepSettings),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub model: Model,
    pub output: Option<String>,
    /// The document as given, echoed into the summary.
    pub source: Value,
}

struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    fn new(path: &str, v: &'a Value) -> ConfigResult<Self> {
        match v.as_object() {
            Some(map) => Ok(Self { path: path.to_string(), map }),
            None => Err(invalid(path, "expected an object")),
        }
    }

    fn field(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn allow(&self, keys: &[&str]) -> ConfigResult<()> {
        for k in self.map.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(self.field(k)));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn number(&self, key: &str) -> ConfigResult<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(invalid(&self.field(key), "expected a finite number")),
            },
        }
    }

    fn required(&self, key: &str) -> ConfigResult<f64> {
        self.number(key)?.ok_or_else(|| invalid(&self.field(key), "missing required field"))
    }

    fn count(&self, key: &str, default: usize) -> ConfigResult<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| invalid(&self.field(key), "expected a non-negative integer")),
        }
    }

    fn complex(&self, key: &str) -> ConfigResult<Option<Complex64>> {
        let Some(v) = self.get(key) else { return Ok(None) };
        let field = self.field(key);
        if let Some(x) = v.as_f64() {
            return Ok(Some(Complex64::new(x, 0.0)));
        }
        match v.as_array().map(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>()) {
            Some(Some(parts)) if parts.len() == 2 && parts.iter().all(|x| x.is_finite()) => {
                Ok(Some(Complex64::new(parts[0], parts[1])))
            }
            _ => Err(invalid(&field, "expected a number or [re, im]")),
        }
    }
}

pub fn parse_config(text: &str) -> ConfigResult<RunConfig> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let root = Obj::new("", &doc)?;
    root.allow(&["experiment", "params", "grid", "init", "sweep", "threshold", "picture", "output"])?;
    let experiment = match root.get("experiment").and_then(Value::as_str) {
        Some("jc-compare") => Experiment::JcCompare,
        Some("hhg-spectrum") => Experiment::HhgSpectrum,
        Some("wkbj-demo") => Experiment::WkbjDemo,
        Some("sweep") => Experiment::Sweep,
        Some(other) => return Err(invalid("experiment", format!("unknown experiment `{other}`"))),
        None => return Err(invalid("experiment", "missing required field")),
    };
    let output = match root.get("output") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(invalid("output", "expected a directory path string")),
    };
    let empty = Value::Object(Map::new());
    let params = Obj::new("params", root.get("params").unwrap_or(&empty))?;
    let grid = Obj::new("grid", root.get("grid").unwrap_or(&empty))?;

    let only_for = |key: &str, allowed: bool| -> ConfigResult<()> {
        if root.get(key).is_some() && !allowed {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        Ok(())
    };
    let hhg_like = matches!(experiment, Experiment::HhgSpectrum | Experiment::Sweep);
    only_for("sweep", experiment == Experiment::Sweep)?;
    only_for("threshold", hhg_like)?;
    only_for("picture", hhg_like)?;
    only_for("init", experiment != Experiment::WkbjDemo)?;

    let model = match experiment {
        Experiment::JcCompare => Model::Jc(parse_jc(&params, &grid, root.get("init"))?),
        Experiment::HhgSpectrum => Model::Hhg(parse_hhg(&root, &params, &grid, None)?),
        Experiment::WkbjDemo => Model::Wkbj(parse_wkbj(&params, &grid)?),
        Experiment::Sweep => {
            let sweep_v = root.get("sweep").ok_or_else(|| invalid("sweep", "missing required field"))?;
            let sweep = Obj::new("sweep", sweep_v)?;
            sweep.allow(&["parameter", "values"])?;
            let parameter = match sweep.get("parameter").and_then(Value::as_str) {
                Some("z") => SweepParameter::Z,
                Some("field") => SweepParameter::Field,
                Some("omega0") => SweepParameter::Omega0,
                Some("omegaL") => SweepParameter::OmegaL,
                Some(other) => return Err(invalid("sweep.parameter", format!("cannot sweep `{other}`"))),
                None => return Err(invalid("sweep.parameter", "missing required field")),
            };
            let values: Vec<f64> = match sweep.get("values").and_then(Value::as_array) {
                Some(arr) => arr
                    .iter()
                    .map(|v| v.as_f64().filter(|x| x.is_finite()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| invalid("sweep.values", "expected finite numbers"))?,
                None => return Err(invalid("sweep.values", "missing required field")),
            };
            if values.is_empty() {
                return Err(invalid("sweep.values", "must not be empty"));
            }
            let base = parse_hhg(&root, &params, &grid, Some(parameter))?;
            for &v in &values {
                let point = SweepSettings { parameter, values: vec![], base: base.clone() }.point(v);
                if let Err(e) = point {
                    return Err(invalid("sweep.values", e.to_string()));
                }
            }
            Model::Sweep(SweepSettings { parameter, values, base })
        }
    };
    Ok(RunConfig { experiment, model, output, source: doc })
}

fn parse_init(init: Option<&Value>) -> ConfigResult<Option<(Complex64, Complex64)>> {
    let Some(v) = init else { return Ok(None) };
    let obj = Obj::new("init", v)?;
    obj.allow(&["c1", "c2"])?;
    let c1 = obj.complex("c1")?.unwrap_or_default();
    let c2 = obj.complex("c2")?.unwrap_or_default();
    if c1.norm_sqr() + c2.norm_sqr() == 0.0 {
        return Err(invalid("init", "amplitudes must not both vanish"));
    }
    Ok(Some((c1, c2)))
}

fn parse_jc(params: &Obj, grid: &Obj, init: Option<&Value>) -> ConfigResult<JcSettings> {
    params.allow(&["omega", "omega0", "g", "n"])?;
    grid.allow(&["samples", "t1"])?;
    let n = params.count("n", 0)?;
    let n = u32::try_from(n).map_err(|_| invalid("params.n", "photon number too large"))?;
    let p = JcParams::new(params.required("omega")?, params.required("omega0")?, params.required("g")?, n);
    let samples = grid.count("samples", DEFAULT_JC_SAMPLES)?;
    if samples < 2 {
        return Err(invalid("grid.samples", "need at least 2 samples"));
    }
    let t1 = match grid.number("t1")? {
        Some(t) => t,
        None => {
            let d = p.detuning().abs();
            if d == 0.0 {
                return Err(invalid("grid.t1", "required when the detuning is zero"));
            }
            DEFAULT_JC_SPAN / d
        }
    };
    if t1 <= 0.0 {
        return Err(invalid("grid.t1", "must be positive"));
    }
    let (c1, c2) = parse_init(init)?.unwrap_or((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
    Ok(JcSettings { params: p, init: JcAmplitudes::new(c1, c2).normalized(), samples, t1 })
}

fn parse_hhg(root: &Obj, params: &Obj, grid: &Obj, swept: Option<SweepParameter>) -> ConfigResult<HhgSettings> {
    params.allow(&["omega0", "omegaL", "dipole", "field", "z"])?;
    grid.allow(&["samplesPerPeriod", "periods"])?;
    let is_swept = |p: SweepParameter| swept == Some(p);
    let omega_l = match params.number("omegaL")? {
        Some(v) => v,
        None if is_swept(SweepParameter::OmegaL) => 1.0,
        None => return Err(invalid("params.omegaL", "missing required field")),
    };
    if omega_l <= 0.0 && !is_swept(SweepParameter::OmegaL) {
        return Err(invalid("params.omegaL", "must be positive"));
    }
    let omega0 = match params.number("omega0")? {
        Some(v) => v,
        None if is_swept(SweepParameter::Omega0) => 0.0,
        None => return Err(invalid("params.omega0", "missing required field")),
    };
    let dipole = params.number("dipole")?.unwrap_or(1.0);
    if dipole == 0.0 {
        return Err(invalid("params.dipole", "must be non-zero"));
    }
    let field_swept = is_swept(SweepParameter::Z) || is_swept(SweepParameter::Field);
    let hp = match (params.number("field")?, params.number("z")?) {
        (Some(_), Some(_)) => return Err(invalid("params.z", "give either `field` or `z`, not both")),
        (Some(f), None) => HhgParams::new(omega0, omega_l.max(f64::MIN_POSITIVE), f, dipole),
        (None, Some(z)) => HhgParams::from_z(omega0, omega_l.max(f64::MIN_POSITIVE), z, dipole),
        (None, None) if field_swept => HhgParams::new(omega0, omega_l.max(f64::MIN_POSITIVE), 0.0, dipole),
        (None, None) => return Err(invalid("params.field", "missing required field (or give `z`)")),
    }
    .map_err(|e| invalid("params", e.to_string()))?;

    let samples_per_period = grid.count("samplesPerPeriod", DEFAULT_SAMPLES_PER_PERIOD)?;
    let periods = grid.count("periods", DEFAULT_PERIODS)?;
    let total = samples_per_period * periods;
    if total < 4 || !total.is_power_of_two() {
        return Err(invalid("grid.samplesPerPeriod", format!("samplesPerPeriod x periods = {total} must be a power of two >= 4")));
    }
    let threshold = root.number("threshold")?.unwrap_or(DEFAULT_THRESHOLD);
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(invalid("threshold", "must lie in (0, 1]"));
    }
    let picture = match root.get("picture").map(|v| v.as_str()) {
        None | Some(Some("schrodinger")) => Picture::Schrodinger,
        Some(Some("interaction")) => Picture::Interaction,
        Some(_) => return Err(invalid("picture", "expected \"schrodinger\" or \"interaction\"")),
    };
    // a sweep follows the hyper-Raman lines, which need both levels populated
    let default_init = if swept.is_some() { Populations::balanced() } else { Populations::ground() };
    let init = match parse_init(root.get("init"))? {
        Some((c1, c2)) => Populations::new(c1, c2).map_err(|e| invalid("init", e.to_string()))?,
        None => default_init,
    };
    Ok(HhgSettings { params: hp, init, samples_per_period, periods, threshold, picture })
}

fn parse_wkbj(params: &Obj, grid: &Obj) -> ConfigResult<WkbjSettings> {
    params.allow(&["epsilon", "x0", "x1", "psi0", "phi0"])?;
    grid.allow(&["samples"])?;
    let epsilon = params.required("epsilon")?;
    let x0 = params.number("x0")?.unwrap_or(0.0);
    let x1 = params.number("x1")?.unwrap_or(10.0);
    if x1 <= x0 {
        return Err(invalid("params.x1", "must exceed x0"));
    }
    let psi0 = params.complex("psi0")?.unwrap_or(Complex64::new(1.0, 0.0));
    let phi0 = params.complex("phi0")?.unwrap_or(Complex64::new(0.0, 0.0));
    let samples = grid.count("samples", DEFAULT_WKBJ_SAMPLES)?;
    if samples < 2 {
        return Err(invalid("grid.samples", "need at least 2 samples"));
    }
    Ok(WkbjSettings { epsilon, x0, x1, psi0, phi0, samples })
}
