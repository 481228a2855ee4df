//! Summary statistics: nearest-rank quantiles and means.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty sample set")]
    Empty,
}

/// Nearest-rank quantile: for `q` in [0, 1] over n sorted samples, the value
/// at rank ceil(q·n), clamped to [1, n].
pub fn percentile(samples: &[f64], q: f64) -> Result<f64, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in samples"));
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    Ok(sorted[rank - 1])
}

pub fn percentiles(samples: &[f64], qs: &[f64]) -> Result<Vec<f64>, StatsError> {
    qs.iter().map(|&q| percentile(samples, q)).collect()
}

pub fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}
