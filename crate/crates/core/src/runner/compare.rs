use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::run::RunReport;

/// Tolerance on fitted vs analytic `t_D` unless overridden.
pub const DEFAULT_FIT_TOLERANCE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub analytic: Option<f64>,
    pub fitted: Option<f64>,
    pub fit_error: Option<f64>,
    pub caption: Option<f64>,
    pub target: Option<f64>,
    pub caption_error: Option<f64>,
    pub pass: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Fixed-width table of `lambda * t_D` values.
    pub fn to_text(&self) -> String {
        let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
        let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{:.3}%", 100.0 * v));
        let mut out = format!(
            "{:<24} {:>10} {:>10} {:>9} {:>10} {:>10} {:>9}  status\n",
            "name", "analytic", "fitted", "fit err", "caption", "target", "cap err"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<24} {:>10} {:>10} {:>9} {:>10} {:>10} {:>9}  {}{}",
                r.name,
                cell(r.analytic),
                cell(r.fitted),
                pct(r.fit_error),
                cell(r.caption),
                cell(r.target),
                pct(r.caption_error),
                if r.pass { "PASS" } else { "FAIL" },
                r.reason.as_ref().map_or(String::new(), |s| format!(" ({s})")),
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record([
            "name", "analytic", "fitted", "fit_error", "caption", "target", "caption_error", "pass",
        ]);
        let f = |v: Option<f64>| v.map(super::run::format_float).unwrap_or_default();
        for r in &self.rows {
            let _ = w.write_record([
                r.name.clone(),
                f(r.analytic),
                f(r.fitted),
                f(r.fit_error),
                f(r.caption),
                f(r.target),
                f(r.caption_error),
                r.pass.to_string(),
            ]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

/// Tabulates analytic, fitted and caption `lambda * t_D`.
///
/// `tolerance` (a fraction) replaces both the caption tolerances declared in
/// the reports and [`DEFAULT_FIT_TOLERANCE`].
pub fn compare_reports(reports: &[RunReport], tolerance: Option<f64>) -> Comparison {
    let rows = reports
        .iter()
        .map(|r| {
            let analytic = r.times.as_ref().map(|t| t.lambda_t_d);
            let fitted = r
                .fit
                .as_ref()
                .zip(r.times.as_ref())
                .map(|(f, t)| f.t_d * t.lambda_ref);
            let fit_error = analytic.zip(fitted).map(|(a, f)| (f / a - 1.0).abs());
            let caption_error = r
                .caption
                .as_ref()
                .zip(analytic)
                .map(|(c, a)| (a / c.target - 1.0).abs());
            let mut reasons = Vec::new();
            if let Some(e) = &r.error {
                reasons.push(e.clone());
            }
            if analytic.is_none() && r.error.is_none() {
                reasons.push("no analytic t_D".into());
            }
            let fit_tol = tolerance.unwrap_or(DEFAULT_FIT_TOLERANCE);
            if fit_error.is_some_and(|e| !(e <= fit_tol)) {
                reasons.push(format!("fit off by more than {}%", 100.0 * fit_tol));
            }
            if let (Some(c), Some(e)) = (&r.caption, caption_error) {
                let tol = tolerance.unwrap_or(c.tolerance);
                if !(e <= tol) {
                    reasons.push(format!("caption off by more than {}%", 100.0 * tol));
                }
            }
            ComparisonRow {
                name: r.name.clone(),
                analytic,
                fitted,
                fit_error,
                caption: r.caption.as_ref().map(|c| c.caption),
                target: r.caption.as_ref().map(|c| c.target),
                caption_error,
                pass: reasons.is_empty(),
                reason: (!reasons.is_empty()).then(|| reasons.join("; ")),
            }
        })
        .collect();
    Comparison { rows }
}
