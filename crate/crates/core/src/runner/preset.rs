use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::analytic::equivalent_reservoir;
use crate::error::{Error, Result};
use crate::model::ModeDistribution;

use super::config::ScenarioConfig;
use super::run::{run_scenario, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Thermal reservoirs.
    Fig1,
    /// Phase-state reservoirs with the same per-mode spread as `Fig1`.
    Fig2,
    /// Phase-state reservoirs coupled through the square root of the
    /// occupation number.
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig1, Preset::Fig2, Preset::Fig4];
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig4 => "fig4",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::Validation(vec![format!("unknown preset `{s}`; expected fig1, fig2 or fig4")]))
    }
}

/// `(modes, per-mode Delta_2, caption lambda t_D)` of the thermal rows.
const THERMAL_ROWS: [(usize, f64, f64); 4] = [
    (201, 3.16, 0.032),
    (1, 44.83, 0.032),
    (1, 6.61, 0.214),
    (15, 1.71, 0.214),
];

/// `(r, modes, caption lambda t_D)` of the square-root coupling rows.
const SQRT_ROWS: [(usize, usize, f64); 4] = [(10, 20, 0.49), (289, 1, 0.49), (2, 2, 2.37), (8, 1, 2.37)];

const CAPTION_TOLERANCE: f64 = 0.02;
const SQRT_TOLERANCE: f64 = 0.03;

fn scenario(name: String, y: Value, state: Value, count: usize, insert: bool, caption: Value) -> Value {
    let mut grid = json!({"t_max": 7.0, "n_samples": 701, "scale": "lambda_t"});
    if insert {
        grid["insert"] = json!({"start": 2.0 * PI - 0.5, "end": 2.0 * PI + 0.5, "n_samples": 1001});
    }
    json!({
        "name": name,
        "model": {"hbar": 1.0, "x": 1, "y": y, "g": 1},
        "reservoir": [{"state": state, "coupling": "1/10", "count": count}],
        "time_grid": grid,
        "caption": caption,
    })
}

/// Configs of a preset's curves, with `derived` values to attach to each
/// report.
pub fn preset_configs(preset: Preset) -> Vec<(ScenarioConfig, Vec<(String, f64)>)> {
    let rows: Vec<(Value, Vec<(String, f64)>)> = match preset {
        Preset::Fig1 => THERMAL_ROWS
            .iter()
            .map(|&(m, d2, caption)| {
                let state = json!({"kind": "thermal", "delta2": d2});
                let name = format!("fig1-m{m}-d{d2}");
                let caption = json!({"lambda_t_d": caption, "tolerance": CAPTION_TOLERANCE});
                (scenario(name, json!(1), state, m, true, caption), vec![])
            })
            .collect(),
        Preset::Fig2 => THERMAL_ROWS
            .iter()
            .map(|&(m, d2, caption)| {
                let r = equivalent_reservoir(d2).r_trunc;
                let state = json!({"kind": "phase", "r": r, "m": 0});
                let name = format!("fig2-m{m}-r{r}");
                let caption = json!({"lambda_t_d": caption, "tolerance": CAPTION_TOLERANCE});
                let spread = ModeDistribution::phase_state(r, 0)
                    .map(|d| d.variance_of_power(crate::model::Exponent::ONE).sqrt())
                    .unwrap_or(f64::NAN);
                let derived = vec![
                    ("delta2_target".to_string(), d2),
                    ("r".to_string(), r as f64),
                    ("delta2_phase".to_string(), spread),
                ];
                (scenario(name, json!(1), state, m, true, caption), derived)
            })
            .collect(),
        Preset::Fig4 => SQRT_ROWS
            .iter()
            .map(|&(r, m, caption)| {
                let state = json!({"kind": "phase", "r": r, "m": 0});
                let name = format!("fig4-r{r}-m{m}");
                let caption = json!({
                    "lambda_t_d": caption,
                    "tolerance": SQRT_TOLERANCE,
                    "scale": 1.0 / SQRT_2,
                });
                (scenario(name, json!("1/2"), state, m, false, caption), vec![])
            })
            .collect(),
    };
    rows.into_iter()
        .map(|(v, derived)| (ScenarioConfig::from_value(v).expect("preset configs are valid"), derived))
        .collect()
}

/// Runs every curve of a preset, writing CSVs and reports into `out_dir`.
pub fn run_preset(preset: Preset, out_dir: &Path) -> Result<Vec<RunReport>> {
    preset_configs(preset)
        .into_iter()
        .map(|(config, derived)| {
            let mut report = run_scenario(&config, out_dir)?;
            if !derived.is_empty() {
                report.derived.extend(derived);
                super::run::write_report(&out_dir.join(format!("{}.report.json", config.name)), &report)?;
            }
            Ok(report)
        })
        .collect()
}
