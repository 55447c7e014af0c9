//! Post-signal change-point estimation on score-statistic series: a
//! two-sample mean-difference scan with the variance fixed at its
//! in-control population value (1 for location statistics, 2 for squared
//! scores).

use crate::error::{Error, Result};
use serde::Serialize;

/// Scan result: T(k) for every admissible split k (the second group starts
/// at k) and the argmax estimate, interpreted as the first index of the new
/// regime. Ties break toward the smallest k.
#[derive(Debug, Clone, Serialize)]
pub struct ChangePointResult {
    pub t_series: Vec<(usize, f64)>,
    pub estimate: usize,
    pub signal_index: usize,
}

fn scan(series: &[f64], signal_index: usize, first_candidate: usize, var: f64) -> Result<ChangePointResult> {
    if signal_index < 3 || signal_index > series.len() {
        return Err(Error::InvalidInput(format!(
            "signal_index must lie in [3, {}], got {signal_index}",
            series.len()
        )));
    }
    if first_candidate < 2 || first_candidate > signal_index {
        return Err(Error::InvalidInput(format!(
            "first_candidate must lie in [2, {signal_index}], got {first_candidate}"
        )));
    }
    // Prefix sums make every split O(1).
    let mut prefix = vec![0.0; signal_index + 1];
    for i in 0..signal_index {
        prefix[i + 1] = prefix[i] + series[i];
    }
    let total = prefix[signal_index];
    let mut t_series = Vec::with_capacity(signal_index + 1 - first_candidate);
    let mut best: Option<(usize, f64)> = None;
    for k in first_candidate..=signal_index {
        let m = k - 1; // first group: entries 1..k-1
        let n = signal_index - m; // second group: entries k..signal_index
        let mean_x = prefix[m] / m as f64;
        let mean_y = (total - prefix[m]) / n as f64;
        let t = (mean_y - mean_x) / (var / n as f64 + var / m as f64).sqrt();
        t_series.push((k, t));
        match best {
            Some((_, bt)) if t <= bt => {}
            _ => best = Some((k, t)),
        }
    }
    let (estimate, _) = best.unwrap();
    Ok(ChangePointResult {
        t_series,
        estimate,
        signal_index,
    })
}

/// Location change point on a batch statistic series (population variance 1);
/// candidate splits k = 2..=signal_index.
pub fn change_point_location(z_series: &[f64], signal_index: usize) -> Result<ChangePointResult> {
    scan(z_series, signal_index, 2, 1.0)
}

/// Location change point with a restricted candidate range, for pipelines
/// whose early entries belong to a designated reference period.
pub fn change_point_location_from(
    z_series: &[f64],
    signal_index: usize,
    first_candidate: usize,
) -> Result<ChangePointResult> {
    scan(z_series, signal_index, first_candidate, 1.0)
}

/// Scale change point on a per-observation squared-score series (population
/// variance 2). `first_candidate` is usually the first post-reference index;
/// the within-reference entries stay in the first group of every split.
pub fn change_point_scale(
    y_series: &[f64],
    signal_index: usize,
    first_candidate: usize,
) -> Result<ChangePointResult> {
    scan(y_series, signal_index, first_candidate, 2.0)
}

/// Location change point for unequal batch sizes: each group's mean is
/// sum(z_i * sqrt(N_i)) / sum(N_i) and its effective sample size sum(N_i).
pub fn change_point_weighted(
    z_series: &[f64],
    sizes: &[usize],
    signal_index: usize,
) -> Result<ChangePointResult> {
    if sizes.len() != z_series.len() {
        return Err(Error::InvalidInput(
            "sizes and series must have the same length".into(),
        ));
    }
    if signal_index < 3 || signal_index > z_series.len() {
        return Err(Error::InvalidInput(format!(
            "signal_index must lie in [3, {}], got {signal_index}",
            z_series.len()
        )));
    }
    let mut num = vec![0.0; signal_index + 1]; // prefix of z * sqrt(N)
    let mut den = vec![0.0; signal_index + 1]; // prefix of N
    for i in 0..signal_index {
        num[i + 1] = num[i] + z_series[i] * (sizes[i] as f64).sqrt();
        den[i + 1] = den[i] + sizes[i] as f64;
    }
    let mut t_series = Vec::with_capacity(signal_index - 1);
    let mut best: Option<(usize, f64)> = None;
    for k in 2..=signal_index {
        let m = k - 1;
        let nx = den[m];
        let ny = den[signal_index] - den[m];
        let mean_x = num[m] / nx;
        let mean_y = (num[signal_index] - num[m]) / ny;
        let t = (mean_y - mean_x) / (1.0 / nx + 1.0 / ny).sqrt();
        t_series.push((k, t));
        match best {
            Some((_, bt)) if t <= bt => {}
            _ => best = Some((k, t)),
        }
    }
    let (estimate, _) = best.unwrap();
    Ok(ChangePointResult {
        t_series,
        estimate,
        signal_index,
    })
}
