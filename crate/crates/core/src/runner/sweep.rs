use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};

use super::config::{lookup_mut, ScenarioConfig};
use super::run::{evaluate, format_float, Assignment, RunReport};

/// Environment variable overriding the worker count.
pub const JOBS_ENV: &str = "DEPHASE_JOBS";

/// `--jobs` beats `DEPHASE_JOBS`, which beats the number of cores.
pub fn worker_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return positive(n, "--jobs");
    }
    match std::env::var(JOBS_ENV) {
        Ok(text) => {
            let n = text
                .trim()
                .parse()
                .map_err(|_| Error::Validation(vec![format!("{JOBS_ENV}: not a count: `{text}`")]))?;
            positive(n, JOBS_ENV)
        }
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn positive(n: usize, source: &str) -> Result<usize> {
    if n == 0 {
        Err(Error::Validation(vec![format!("{source}: must be >= 1")]))
    } else {
        Ok(n)
    }
}

/// One grid point: its substitutions and the patched config (or why patching
/// failed).
pub struct SweepPoint {
    pub index: usize,
    pub assignments: Vec<Assignment>,
    pub config: Result<ScenarioConfig>,
}

/// Cartesian product of the sweep axes, last axis varying fastest. A config
/// without axes yields one point.
pub fn expand(config: &ScenarioConfig) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    let mut base = serde_json::to_value(config)?;
    if let Value::Object(map) = &mut base {
        map.remove("sweep");
    }
    let axes = &config.sweep;
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rest = index;
        let mut picks = vec![0; axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            picks[k] = rest % axis.values.len();
            rest /= axis.values.len();
        }
        let mut doc = base.clone();
        let assignments: Vec<Assignment> = axes
            .iter()
            .zip(&picks)
            .map(|(axis, &i)| Assignment { field: axis.field.clone(), value: axis.values[i].clone() })
            .collect();
        for a in &assignments {
            *lookup_mut(&mut doc, &a.field).expect("validated path") = a.value.clone();
        }
        if total > 1 {
            doc["name"] = Value::String(format!("{}-{index}", config.name));
        }
        points.push(SweepPoint { index, assignments, config: ScenarioConfig::from_value(doc) });
    }
    Ok(points)
}

/// Evaluates every grid point on `jobs` workers. Reports come back in grid
/// order; a failing point yields a report carrying its error.
pub fn run_sweep(config: &ScenarioConfig, jobs: usize) -> Result<Vec<RunReport>> {
    let points = expand(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Validation(vec![format!("worker pool: {e}")]))?;
    Ok(pool.install(|| points.par_iter().map(evaluate_point).collect()))
}

fn evaluate_point(point: &SweepPoint) -> RunReport {
    let mut report = match &point.config {
        Ok(c) => evaluate(c).map(|run| run.report).unwrap_or_else(|e| RunReport::failed(&c.name, &e)),
        Err(e) => RunReport::failed(&format!("point-{}", point.index), e),
    };
    report.assignments = point.assignments.clone();
    report
}

/// Runs the sweep and writes the per-point summary CSV into `out_dir`.
pub fn run_sweep_to(config: &ScenarioConfig, jobs: usize, out_dir: &Path) -> Result<(Vec<RunReport>, PathBuf)> {
    let reports = run_sweep(config, jobs)?;
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(
        config
            .outputs
            .csv
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}-sweep.csv", config.name))),
    );
    write_summary(&path, config, &reports)?;
    Ok((reports, path))
}

/// One row per grid point, in grid order.
pub fn write_summary(path: &Path, config: &ScenarioConfig, reports: &[RunReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["index".to_string()];
    header.extend(config.sweep.iter().map(|a| a.field.clone()));
    header.extend(
        [
            "t_d", "lambda_t_d", "t_r", "tau_r", "hilbert_size", "fitted_t_d", "delta1", "delta_max",
            "delta_mean", "oracle_discrepancy", "caption_pass", "error",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for (index, r) in reports.iter().enumerate() {
        let mut row = vec![index.to_string()];
        row.extend(r.assignments.iter().map(|a| a.value.to_string()));
        let t = r.times.as_ref();
        row.extend([
            opt(t.map(|t| t.t_d)),
            opt(t.map(|t| t.lambda_t_d)),
            opt(t.and_then(|t| t.t_r)),
            opt(t.map(|t| t.tau_r)),
            opt(t.map(|t| t.hilbert_size)),
            opt(r.fit.as_ref().map(|f| f.t_d)),
            opt(r.fit.as_ref().map(|f| f.delta1)),
            opt(r.delta_max),
            opt(r.delta_mean),
            opt(r.oracle_discrepancy),
            r.caption.as_ref().map(|c| c.pass.to_string()).unwrap_or_default(),
            r.error.as_deref().unwrap_or_default().replace('\n', "; "),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
