use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const MIN_FIT_SAMPLES: usize = 8;

/// Higher-order terms must stay below this fraction of the quadratic term at
/// the window edge.
const HIGHER_ORDER_FRACTION: f64 = 0.01;

/// Highest power in the fit basis. Powers above two absorb the curvature
/// beyond the short-time expansion so it does not leak into `delta1`,
/// `delta2`.
const FIT_DEGREE: usize = 5;

/// Short-time expansion `delta(t) ~ delta1 t + delta2 t^2` read off a series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceFit {
    pub t_d: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Upper end of the window finally used.
    pub window: f64,
    pub samples: usize,
}

/// Least-squares fit of the short-time expansion of `delta(t)`.
///
/// Uses the samples with `t <= window` (all samples when `None`) and halves
/// the window until the terms beyond `t^2` contribute less than 1% of the
/// quadratic term at the window edge. Requires `delta(0) < 1e-12` at the
/// first sample `t = 0`, and at least [`MIN_FIT_SAMPLES`] samples in the final
/// window.
pub fn fit_decoherence_time(series: &TimeSeries, window: Option<f64>) -> Result<DecoherenceFit> {
    let (times, values) = (series.times(), series.values());
    match (times.first(), values.first()) {
        (Some(&t0), Some(&d0)) if t0 == 0.0 && d0.abs() < 1e-12 => {}
        _ => {
            return Err(Error::Fit(
                "series must start at t = 0 with delta(0) < 1e-12".into(),
            ))
        }
    }
    let mut edge = window.unwrap_or(f64::INFINITY).min(*times.last().unwrap());
    loop {
        let n = times.iter().take_while(|&&t| t <= edge).count();
        if n < MIN_FIT_SAMPLES {
            return Err(Error::Fit(format!(
                "only {n} samples in [0, {edge}] after shrinking; need {MIN_FIT_SAMPLES}"
            )));
        }
        let span = times[n - 1];
        let coeffs = polynomial_fit(&times[..n], &values[..n], span)?;
        let quadratic = coeffs[1];
        if quadratic <= 0.0 {
            return Err(Error::NoDecoherence(format!(
                "fitted quadratic coefficient is {}",
                quadratic / (span * span)
            )));
        }
        let higher: f64 = coeffs[2..].iter().map(|c| c.abs()).sum();
        if higher < HIGHER_ORDER_FRACTION * quadratic {
            let delta1 = coeffs[0] / span;
            let delta2 = quadratic / (span * span);
            return Ok(DecoherenceFit {
                t_d: 1.0 / delta2.sqrt(),
                delta1,
                delta2,
                window: span,
                samples: n,
            });
        }
        edge = span / 2.0;
    }
}

/// Coefficients of `sum_{k=1..=FIT_DEGREE} c_k s^k`, `s = t / span`.
fn polynomial_fit(times: &[f64], values: &[f64], span: f64) -> Result<Vec<f64>> {
    let degree = FIT_DEGREE.min(times.len() - 1);
    let a = DMatrix::from_fn(times.len(), degree, |i, k| (times[i] / span).powi(k as i32 + 1));
    let b = DVector::from_column_slice(values);
    let solution = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Fit(e.to_string()))?;
    Ok(solution.iter().copied().collect())
}
