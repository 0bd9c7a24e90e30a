use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Moving average of `delta` over a centred window of width `resolution`,
/// modelling a detector with finite time resolution.
///
/// The series is treated as piecewise linear, so the average is exact for
/// any sample spacing; near the ends the window is clipped to the series.
pub fn coarse_grain(series: &TimeSeries, resolution: f64) -> Result<TimeSeries> {
    if !(resolution >= 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidSeries(format!(
            "resolution must be finite and >= 0, got {resolution}"
        )));
    }
    if resolution == 0.0 || series.len() < 2 {
        return Ok(series.clone());
    }
    let (t, v) = (series.times(), series.values());
    let mut cumulative = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
        cumulative.push(acc);
    }
    let integral_to = |x: f64| -> f64 {
        // Index of the segment [t[k], t[k + 1]] holding x.
        let k = t.partition_point(|&ti| ti <= x).saturating_sub(1).min(t.len() - 2);
        let h = x - t[k];
        let slope = (v[k + 1] - v[k]) / (t[k + 1] - t[k]);
        cumulative[k] + h * (v[k] + 0.5 * slope * h)
    };
    let (first, last) = (t[0], t[t.len() - 1]);
    let values = t
        .iter()
        .map(|&ti| {
            let a = (ti - 0.5 * resolution).max(first);
            let b = (ti + 0.5 * resolution).min(last);
            (integral_to(b) - integral_to(a)) / (b - a)
        })
        .collect();
    Ok(TimeSeries::new(t.to_vec(), values)?.with_meta(series.meta.clone()))
}
