use serde::{Deserialize, Serialize};

/// Coverage of every reported bootstrap interval.
pub const CONFIDENCE_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile interval of the bootstrap replicates, widened if necessary so
/// it always contains the point estimate. With no replicates the interval
/// collapses onto the estimate.
pub fn percentile_interval(replicates: &[f64], estimate: f64) -> ConfidenceInterval {
    let mut v: Vec<f64> = replicates.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return ConfidenceInterval { low: estimate, high: estimate };
    }
    v.sort_by(f64::total_cmp);
    let alpha = 1.0 - CONFIDENCE_LEVEL;
    let low = quantile(&v, alpha / 2.0).min(estimate);
    let high = quantile(&v, 1.0 - alpha / 2.0).max(estimate);
    ConfidenceInterval { low, high }
}
