use serde::Serialize;

use super::series::QuarterlySeries;

/// Descriptive statistics over the present values of a series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); zero when n < 2.
    pub sd: f64,
    pub min: f64,
    pub p25: f64,
    pub p75: f64,
    pub max: f64,
}

/// Quantile by linear interpolation between order statistics at
/// position `p * (n - 1)`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl SummaryStats {
    /// `None` when the series has no present values.
    pub fn of(series: &QuarterlySeries) -> Option<Self> {
        let mut values: Vec<f64> = series.observations().map(|(_, v)| v).collect();
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self {
            n,
            mean,
            sd,
            min: values[0],
            p25: quantile(&values, 0.25),
            p75: quantile(&values, 0.75),
            max: values[n - 1],
        })
    }
}
