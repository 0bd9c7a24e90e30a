use serde::{Deserialize, Serialize};

use crate::series::TimeSeries;

/// A purity revival: an interior local minimum of `delta(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevivalEvent {
    pub time: f64,
    /// `delta` at the minimum.
    pub depth: f64,
    /// Width where `delta` crosses halfway between the minimum and the
    /// plateau; absent when the dip runs off either end of the series.
    pub full_width: Option<f64>,
}

/// Interior local minima of `delta` lying below `depth_threshold`.
///
/// The plateau is the largest sample in the series; end points are never
/// reported since they cannot be confirmed as minima.
pub fn detect_revivals(series: &TimeSeries, depth_threshold: f64) -> Vec<RevivalEvent> {
    let (t, v) = (series.times(), series.values());
    if v.len() < 3 {
        return Vec::new();
    }
    let plateau = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut events = Vec::new();
    for i in 1..v.len() - 1 {
        let is_min = v[i] <= v[i - 1] && v[i] < v[i + 1] || v[i] < v[i - 1] && v[i] <= v[i + 1];
        if !is_min || v[i] >= depth_threshold || v[i] >= plateau {
            continue;
        }
        let half = v[i] + 0.5 * (plateau - v[i]);
        let left = (0..i).rev().find(|&j| v[j] >= half).map(|j| crossing(t, v, j, j + 1, half));
        let right = (i + 1..v.len()).find(|&j| v[j] >= half).map(|j| crossing(t, v, j - 1, j, half));
        events.push(RevivalEvent {
            time: t[i],
            depth: v[i],
            full_width: left.zip(right).map(|(l, r)| r - l),
        });
    }
    events
}

/// Linear interpolation of the time where the segment `a..b` reaches `level`.
fn crossing(t: &[f64], v: &[f64], a: usize, b: usize, level: f64) -> f64 {
    let dv = v[b] - v[a];
    if dv == 0.0 {
        return t[a];
    }
    t[a] + (level - v[a]) / dv * (t[b] - t[a])
}
