use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analytic::{equivalent_reservoir, least_multiple_frequency};
use crate::error::{Error, Result};
use crate::exact::Real;
use crate::model::{
    Exponent, ModeDistribution, ModelSpec, ReservoirMode, ReservoirSpec, SystemState,
    DEFAULT_TAIL_EPSILON,
};
use crate::oracle::{ModeState, DEFAULT_SIZE_CAP};
use crate::series::linspace;

/// One scenario as read from JSON.
///
/// Exact rationals may be given as strings (`"1/10"`); JSON numbers are read
/// as floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub system: SystemConfig,
    pub reservoir: Vec<ReservoirEntry>,
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caption: Option<Caption>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub hbar: f64,
    pub x: Real,
    pub y: Real,
    pub omega: f64,
    pub g: Real,
    pub big_omega: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            x: Real::ONE,
            y: Real::ONE,
            omega: 0.0,
            g: Real::integer(0),
            big_omega: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// `(|0> + |1>) / sqrt(2)`.
    #[default]
    Superposition,
    Fock { n: usize },
    /// Row-major density matrix; `im` defaults to zero.
    Custom {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirEntry {
    pub state: ModeConfig,
    pub coupling: Real,
    /// Number of identical modes this entry stands for.
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    /// Exactly one of `beta_homega`, `nbar` or `delta2` (standard deviation of
    /// the occupation number).
    Thermal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta_homega: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nbar: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta2: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_epsilon: Option<f64>,
    },
    Phase {
        r: usize,
        #[serde(default)]
        m: usize,
    },
    Fock { n: usize },
    Custom { probs: Vec<f64> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScale {
    Raw,
    /// Times are given as `lambda * t`, with `lambda` the least multiple
    /// frequency of the couplings (or the first non-zero coupling).
    #[default]
    LambdaT,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_samples: usize,
    #[serde(default)]
    pub scale: TimeScale,
    /// Extra dense window merged into the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insert: Option<Window>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub n_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    /// Curve CSV (a summary CSV for sweeps). Relative paths resolve against
    /// the output directory.
    pub csv: Option<PathBuf>,
    pub include_oracle: bool,
    /// Averaging window in the units of the time grid.
    pub coarse_grain_resolution: Option<f64>,
    pub oracle_size_cap: usize,
    pub revival_threshold: f64,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            csv: None,
            include_oracle: false,
            coarse_grain_resolution: None,
            oracle_size_cap: DEFAULT_SIZE_CAP,
            revival_threshold: 1e-3,
        }
    }
}

/// Reference value for the computed `lambda * t_D`; passing means
/// `|computed / (lambda_t_d * scale) - 1| <= tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caption {
    pub lambda_t_d: f64,
    pub tolerance: f64,
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

/// Values substituted at a dotted path such as `reservoir.0.state.delta2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub field: String,
    pub values: Vec<Value>,
}

/// Everything a run needs, built from a validated config.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub model: ModelSpec,
    pub system: SystemState,
    pub reservoir: ReservoirSpec,
    /// Raw times.
    pub times: Vec<f64>,
    /// Factor turning raw time into the grid's units.
    pub time_unit: f64,
    /// Frequency used for `lambda * t`.
    pub lambda_ref: f64,
}

const TOP_LEVEL: [&str; 8] = [
    "name", "model", "system", "reservoir", "time_grid", "outputs", "caption", "sweep",
];

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(value)
    }

    /// Parses each section separately so that problems in several sections
    /// are all reported, then runs [`ScenarioConfig::validate`].
    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(map) = &value else {
            return Err(Error::Validation(vec!["config must be a JSON object".into()]));
        };
        let mut problems = Vec::new();
        for key in map.keys().filter(|k| !TOP_LEVEL.contains(&k.as_str())) {
            problems.push(format!("{key}: unknown field"));
        }
        for key in ["reservoir", "time_grid"] {
            if !map.contains_key(key) {
                problems.push(format!("{key}: missing field"));
            }
        }
        check_section::<ModelConfig>(map.get("model"), "model", &mut problems);
        check_section::<SystemConfig>(map.get("system"), "system", &mut problems);
        check_section::<TimeGrid>(map.get("time_grid"), "time_grid", &mut problems);
        check_section::<Outputs>(map.get("outputs"), "outputs", &mut problems);
        check_section::<Caption>(map.get("caption"), "caption", &mut problems);
        check_section::<Vec<SweepAxis>>(map.get("sweep"), "sweep", &mut problems);
        match map.get("reservoir") {
            Some(Value::Array(entries)) => {
                for (i, entry) in entries.iter().enumerate() {
                    check_section::<ReservoirEntry>(Some(entry), &format!("reservoir.{i}"), &mut problems);
                }
            }
            Some(_) => problems.push("reservoir: expected a list".into()),
            None => {}
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        let config: ScenarioConfig = serde_json::from_value(value.clone())
            .map_err(|e| Error::Validation(vec![e.to_string()]))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every field, reporting all offending ones at once. Sweep paths
    /// are resolved against the config with defaults filled in.
    pub fn validate(&self) -> Result<()> {
        let mut problems = self.problems();
        let value = serde_json::to_value(self)?;
        problems.extend(self.sweep_problems(&value));
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        let m = &self.model;
        if !(m.hbar > 0.0 && m.hbar.is_finite()) {
            p.push(format!("model.hbar: must be positive and finite, got {}", m.hbar));
        }
        for (name, e) in [("model.x", m.x), ("model.y", m.y)] {
            if !(e.value() > 0.0 && e.value().is_finite()) {
                p.push(format!("{name}: exponent must be positive, got {e}"));
            }
        }
        if !m.omega.is_finite() {
            p.push("model.omega: must be finite".into());
        }
        if !(m.g.value() >= 0.0 && m.g.value().is_finite()) {
            p.push(format!("model.g: must be finite and >= 0, got {}", m.g));
        }
        if !m.big_omega.is_finite() {
            p.push("model.big_omega: must be finite".into());
        }
        match &self.system {
            SystemConfig::Superposition | SystemConfig::Fock { .. } => {}
            SystemConfig::Custom { .. } => {
                if let Err(e) = self.system_state() {
                    p.push(format!("system: {e}"));
                }
            }
        }
        if self.reservoir.is_empty() {
            p.push("reservoir: at least one entry is required".into());
        }
        for (i, entry) in self.reservoir.iter().enumerate() {
            if entry.count == 0 {
                p.push(format!("reservoir.{i}.count: must be >= 1"));
            }
            if !entry.coupling.value().is_finite() {
                p.push(format!("reservoir.{i}.coupling: must be finite"));
            }
            p.extend(mode_problems(&entry.state, &format!("reservoir.{i}.state")));
        }
        let g = &self.time_grid;
        if !(g.t_max > 0.0 && g.t_max.is_finite()) {
            p.push(format!("time_grid.t_max: must be positive and finite, got {}", g.t_max));
        }
        if g.n_samples < 2 {
            p.push(format!("time_grid.n_samples: must be >= 2, got {}", g.n_samples));
        }
        if let Some(w) = &g.insert {
            if !(w.start >= 0.0 && w.end > w.start && w.end.is_finite()) {
                p.push(format!("time_grid.insert: need 0 <= start < end, got [{}, {}]", w.start, w.end));
            }
            if w.n_samples < 2 {
                p.push(format!("time_grid.insert.n_samples: must be >= 2, got {}", w.n_samples));
            }
        }
        if g.scale == TimeScale::LambdaT && self.reservoir.iter().all(|e| e.coupling.is_zero()) {
            p.push("time_grid.scale: lambda_t needs a non-zero coupling".into());
        }
        let o = &self.outputs;
        if let Some(r) = o.coarse_grain_resolution {
            if !(r >= 0.0 && r.is_finite()) {
                p.push(format!("outputs.coarse_grain_resolution: must be >= 0, got {r}"));
            }
        }
        if o.oracle_size_cap == 0 {
            p.push("outputs.oracle_size_cap: must be >= 1".into());
        }
        if !o.revival_threshold.is_finite() {
            p.push("outputs.revival_threshold: must be finite".into());
        }
        if let Some(c) = &self.caption {
            if !(c.lambda_t_d > 0.0 && c.tolerance >= 0.0 && c.scale > 0.0) {
                p.push("caption: lambda_t_d and scale must be positive, tolerance >= 0".into());
            }
        }
        p
    }

    fn sweep_problems(&self, document: &Value) -> Vec<String> {
        let mut p = Vec::new();
        for (i, axis) in self.sweep.iter().enumerate() {
            if axis.values.is_empty() {
                p.push(format!("sweep.{i}.values: grid must be non-empty"));
            }
            if axis.field.split('.').next() == Some("sweep") {
                p.push(format!("sweep.{i}.field: cannot sweep the sweep itself"));
            } else if lookup(document, &axis.field).is_none() {
                p.push(format!("sweep.{i}.field: `{}` does not exist in the config", axis.field));
            }
        }
        p
    }

    pub fn system_state(&self) -> Result<SystemState> {
        match &self.system {
            SystemConfig::Superposition => Ok(SystemState::superposition()),
            SystemConfig::Fock { n } => Ok(SystemState::fock(*n)),
            SystemConfig::Custom { re, im } => {
                let dim = re.len();
                if re.iter().any(|row| row.len() != dim)
                    || im.as_ref().is_some_and(|im| im.len() != dim || im.iter().any(|r| r.len() != dim))
                {
                    return Err(Error::InvalidState("custom matrix must be square".into()));
                }
                let entries = (0..dim * dim)
                    .map(|k| {
                        let (i, j) = (k / dim, k % dim);
                        Complex64::new(re[i][j], im.as_ref().map_or(0.0, |m| m[i][j]))
                    })
                    .collect();
                SystemState::from_matrix(dim, entries)
            }
        }
    }

    pub fn reservoir_spec(&self) -> Result<ReservoirSpec> {
        let mut modes = Vec::new();
        for entry in &self.reservoir {
            let distribution = mode_distribution(&entry.state)?;
            for _ in 0..entry.count {
                modes.push(ReservoirMode { distribution: distribution.clone(), coupling: entry.coupling });
            }
        }
        ReservoirSpec::new(modes)
    }

    /// Full oracle states per mode, keeping phase-state coherences.
    pub fn oracle_modes(&self, reservoir: &ReservoirSpec) -> Result<Vec<ModeState>> {
        let mut out = Vec::with_capacity(reservoir.len());
        let mut modes = reservoir.modes().iter();
        for entry in &self.reservoir {
            for _ in 0..entry.count {
                let mode = modes.next().expect("reservoir built from this config");
                out.push(match entry.state {
                    ModeConfig::Phase { r, m } => ModeState::phase_state(r, m)?,
                    _ => ModeState::from_distribution(&mode.distribution),
                });
            }
        }
        Ok(out)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        self.validate()?;
        let reservoir = self.reservoir_spec()?;
        let m = &self.model;
        let model = ModelSpec::builder()
            .hbar(m.hbar)
            .exponents(Exponent::new(m.x)?, Exponent::new(m.y)?)
            .couplings_of(&reservoir)
            .omega(m.omega)
            .kerr(m.g)
            .reservoir_frequency(m.big_omega)
            .build()?;
        let system = self.system_state()?;
        let couplings: Vec<Real> = reservoir.couplings().collect();
        let lambda_ref = least_multiple_frequency(&couplings)
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .or_else(|| couplings.iter().map(|c| c.value().abs()).find(|&v| v > 0.0))
            .unwrap_or(1.0);
        let time_unit = match self.time_grid.scale {
            TimeScale::Raw => 1.0,
            TimeScale::LambdaT => lambda_ref,
        };
        let g = &self.time_grid;
        let mut scaled = linspace(0.0, g.t_max, g.n_samples);
        if let Some(w) = &g.insert {
            scaled.extend(linspace(w.start, w.end, w.n_samples));
            scaled.sort_by(f64::total_cmp);
            scaled.dedup();
        }
        let times = scaled.iter().map(|s| s / time_unit).collect::<Vec<_>>();
        // Guard against distinct scaled values collapsing after division.
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(vec!["time_grid: samples collide".into()]));
        }
        Ok(Resolved { model, system, reservoir, times, time_unit, lambda_ref })
    }
}

fn check_section<T: DeserializeOwned>(value: Option<&Value>, name: &str, problems: &mut Vec<String>) {
    if let Some(v) = value {
        if let Err(e) = serde_json::from_value::<T>(v.clone()) {
            problems.push(format!("{name}: {e}"));
        }
    }
}

fn mode_problems(state: &ModeConfig, path: &str) -> Vec<String> {
    let mut p = Vec::new();
    match state {
        ModeConfig::Thermal { beta_homega, nbar, delta2, tail_epsilon } => {
            let given = [beta_homega, nbar, delta2].iter().filter(|v| v.is_some()).count();
            if given != 1 {
                p.push(format!("{path}: give exactly one of beta_homega, nbar, delta2"));
            }
            if let Some(b) = beta_homega {
                if !(*b > 0.0) {
                    p.push(format!("{path}.beta_homega: must be > 0, got {b}"));
                }
            }
            for (name, v) in [("nbar", nbar), ("delta2", delta2)] {
                if let Some(v) = v {
                    if !(*v >= 0.0 && v.is_finite()) {
                        p.push(format!("{path}.{name}: must be finite and >= 0, got {v}"));
                    }
                }
            }
            if let Some(e) = tail_epsilon {
                if !(*e > 0.0 && *e < 1.0) {
                    p.push(format!("{path}.tail_epsilon: must lie in (0, 1), got {e}"));
                }
            }
            if p.is_empty() {
                if let Err(e) = mode_distribution(state) {
                    p.push(format!("{path}: {e}"));
                }
            }
        }
        ModeConfig::Phase { r, m } => {
            if m > r {
                p.push(format!("{path}.m: must be <= r = {r}, got {m}"));
            }
        }
        ModeConfig::Fock { .. } => {}
        ModeConfig::Custom { .. } => {
            if let Err(e) = mode_distribution(state) {
                p.push(format!("{path}.probs: {e}"));
            }
        }
    }
    p
}

pub fn mode_distribution(state: &ModeConfig) -> Result<ModeDistribution> {
    match *state {
        ModeConfig::Thermal { beta_homega, nbar, delta2, tail_epsilon } => {
            let eps = tail_epsilon.unwrap_or(DEFAULT_TAIL_EPSILON);
            match (beta_homega, nbar, delta2) {
                (Some(b), None, None) => ModeDistribution::thermal(b, eps),
                (None, Some(n), None) => ModeDistribution::thermal_with_nbar(n, eps),
                (None, None, Some(d)) => ModeDistribution::thermal_with_nbar(equivalent_reservoir(d).nbar, eps),
                _ => Err(Error::InvalidDistribution(
                    "thermal mode needs exactly one of beta_homega, nbar, delta2".into(),
                )),
            }
        }
        ModeConfig::Phase { r, m } => ModeDistribution::phase_state(r, m),
        ModeConfig::Fock { n } => Ok(ModeDistribution::fock(n)),
        ModeConfig::Custom { ref probs } => ModeDistribution::custom(probs.clone()),
    }
}

/// Follows a dotted path of object keys and array indices.
pub fn lookup<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(value, |v, key| match v {
        Value::Object(map) => map.get(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    })
}

pub(crate) fn lookup_mut<'a>(value: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.').try_fold(value, |v, key| match v {
        Value::Object(map) => map.get_mut(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(move |i| items.get_mut(i)),
        _ => None,
    })
}
