use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analytic::{recurrence_time, CharacteristicTimes, LinearEntropy};
use crate::error::{Error, Result};
use crate::oracle::{
    build_full_initial_state, coarse_grain, detect_revivals, evolve_linear_entropy,
    fit_decoherence_time, DecoherenceFit, EnergyTable, RevivalEvent,
};
use crate::series::{linspace, TimeSeries};

use super::config::{Caption, Resolved, ScenarioConfig};

/// Samples used for the short-time fit.
const FIT_SAMPLES: usize = 257;
/// Fit window as a fraction of the analytic `t_D`.
const FIT_WINDOW: f64 = 0.3;

/// Characteristic times, all in raw time units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimesSummary {
    pub t_d: f64,
    pub lambda_t_d: f64,
    pub t_r: Option<f64>,
    pub tau_r: f64,
    /// Recurrence time of the whole reduced state; needs equal couplings.
    pub recurrence: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_ref: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub hilbert_size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptionCheck {
    pub caption: f64,
    /// `caption * scale`, the value the computed one is held against.
    pub target: f64,
    pub computed: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CaptionCheck {
    pub fn new(caption: &Caption, computed: f64) -> Self {
        let target = caption.lambda_t_d * caption.scale;
        let relative_error = (computed / target - 1.0).abs();
        Self {
            caption: caption.lambda_t_d,
            target,
            computed,
            relative_error,
            tolerance: caption.tolerance,
            pass: relative_error <= caption.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub field: String,
    pub value: Value,
}

/// Outcome of one scenario. Revival times and widths are in the time grid's
/// units.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assignments: Vec<Assignment>,
    pub times: Option<TimesSummary>,
    pub fit: Option<DecoherenceFit>,
    pub revivals: Vec<RevivalEvent>,
    pub oracle_discrepancy: Option<f64>,
    pub caption: Option<CaptionCheck>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub derived: BTreeMap<String, f64>,
    pub delta_max: Option<f64>,
    pub delta_mean: Option<f64>,
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl RunReport {
    pub fn failed(name: &str, error: &Error) -> Self {
        Self {
            name: name.to_string(),
            error: Some(error.to_string()),
            ..Self::default()
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Sampled curves of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Curves {
    /// Times in grid units.
    pub scaled: Vec<f64>,
    pub lambda_ref: f64,
    pub analytic: TimeSeries,
    pub oracle: Option<TimeSeries>,
    pub coarse: Option<TimeSeries>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub report: RunReport,
    pub curves: Curves,
}

/// Evaluates a scenario without touching the filesystem.
pub fn evaluate(config: &ScenarioConfig) -> Result<Run> {
    let resolved = config.resolve()?;
    let Resolved { model, system, reservoir, times, time_unit, lambda_ref } = &resolved;
    let engine = LinearEntropy::new(model, system, reservoir)?;
    let analytic = engine.series(times)?.with_meta(config.name.clone());
    let mut report = RunReport {
        name: config.name.clone(),
        ..RunReport::default()
    };

    match CharacteristicTimes::compute(model, system, reservoir) {
        Ok(ct) => {
            let recurrence = match common_coupling(model.couplings()) {
                Some(lambda) => recurrence_time(model.g(), lambda, model.hbar(), 1)?.time(),
                None => None,
            };
            report.times = Some(TimesSummary {
                t_d: ct.t_d,
                lambda_t_d: lambda_ref * ct.t_d,
                t_r: ct.t_r,
                tau_r: ct.tau_r,
                recurrence,
                lambda: ct.lambda,
                lambda_ref: *lambda_ref,
                delta1: ct.delta1,
                delta2: ct.delta2,
                hilbert_size: ct.hilbert_size,
            });
        }
        Err(e) => report.notes.push(format!("characteristic times: {e}")),
    }

    let fit_series = match &report.times {
        Some(t) => engine.series(&linspace(0.0, FIT_WINDOW * t.t_d, FIT_SAMPLES))?,
        None => analytic.clone(),
    };
    match fit_decoherence_time(&fit_series, None) {
        Ok(fit) => report.fit = Some(fit),
        Err(e) => report.notes.push(format!("fit: {e}")),
    }
    if let (Some(caption), Some(times)) = (&config.caption, &report.times) {
        report.caption = Some(CaptionCheck::new(caption, times.lambda_t_d));
    }

    let outputs = &config.outputs;
    report.revivals = detect_revivals(&analytic, outputs.revival_threshold)
        .into_iter()
        .map(|e| RevivalEvent {
            time: e.time * time_unit,
            depth: e.depth,
            full_width: e.full_width.map(|w| w * time_unit),
        })
        .collect();
    let values = analytic.values();
    report.delta_max = Some(values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    report.delta_mean = Some(values.iter().sum::<f64>() / values.len() as f64);

    let oracle = if outputs.include_oracle {
        let modes = config.oracle_modes(reservoir)?;
        let state = build_full_initial_state(system, &modes, outputs.oracle_size_cap)?;
        let table = EnergyTable::new(model, &state)?;
        let series = evolve_linear_entropy(&state, &table, times)?;
        report.oracle_discrepancy = Some(analytic.max_abs_difference(&series)?);
        Some(series)
    } else {
        None
    };
    let coarse = match outputs.coarse_grain_resolution {
        Some(r) => Some(coarse_grain(&analytic, r / time_unit)?),
        None => None,
    };
    let scaled = times.iter().map(|t| t * time_unit).collect();
    Ok(Run {
        report,
        curves: Curves { scaled, lambda_ref: *lambda_ref, analytic, oracle, coarse },
    })
}

fn common_coupling(couplings: &[crate::exact::Real]) -> Option<crate::exact::Real> {
    let first = *couplings.first()?;
    couplings
        .iter()
        .all(|c| c.as_exact().zip(first.as_exact()).map_or(c.value() == first.value(), |(a, b)| a == b))
        .then_some(first)
}

/// Evaluates a scenario and writes `<name>.csv` (or `outputs.csv`) and
/// `<name>.report.json` into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunReport> {
    let Run { mut report, curves } = evaluate(config)?;
    std::fs::create_dir_all(out_dir)?;
    let csv = out_dir.join(
        config
            .outputs
            .csv
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.name))),
    );
    write_curves(&csv, &curves)?;
    report.csv = Some(csv);
    write_report(&out_dir.join(format!("{}.report.json", config.name)), &report)?;
    Ok(report)
}

pub fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_curves(path: &Path, curves: &Curves) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t", "lambda_t", "delta_analytic"];
    if curves.oracle.is_some() {
        header.push("delta_oracle");
    }
    if curves.coarse.is_some() {
        header.push("delta_coarse");
    }
    w.write_record(&header)?;
    for (i, (t, d)) in curves.analytic.iter().enumerate() {
        let mut row = vec![format_float(t), format_float(curves.lambda_ref * t), format_float(d)];
        for s in [&curves.oracle, &curves.coarse].into_iter().flatten() {
            row.push(format_float(s.values()[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns of a curve CSV by header name.
pub fn read_curves(path: &Path) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut columns: BTreeMap<String, Vec<f64>> = header.iter().map(|h| (h.clone(), Vec::new())).collect();
    for record in r.records() {
        let record = record?;
        for (name, field) in header.iter().zip(record.iter()) {
            let v = field
                .parse()
                .map_err(|_| Error::InvalidSeries(format!("bad number `{field}` in column {name}")))?;
            columns.get_mut(name).unwrap().push(v);
        }
    }
    Ok(columns)
}
