use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use super::ols::ols_fit;
use crate::error::{Error, Result};
use crate::timeseries::QuarterlySeries;

/// Fit quality of one candidate lag. `r_squared` is `None` when the lag
/// leaves too few overlapping observations or a degenerate regressor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagScore {
    pub lag: i64,
    pub r_squared: Option<f64>,
    pub n_obs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagScan {
    pub scores: Vec<LagScore>,
}

impl LagScan {
    /// Lag with the highest R²; the smallest such lag on ties.
    pub fn best(&self) -> Option<LagScore> {
        self.scores
            .iter()
            .filter(|s| s.r_squared.is_some())
            .fold(None, |best: Option<LagScore>, s| match best {
                Some(b) if b.r_squared >= s.r_squared => Some(b),
                _ => Some(*s),
            })
    }
}

/// Univariate regression of `response` on `candidate` lagged by each `k` in
/// `lags`, with intercept, over the quarters where both are present.
pub fn lag_scan(response: &QuarterlySeries, candidate: &QuarterlySeries, lags: RangeInclusive<i64>) -> Result<LagScan> {
    if lags.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "empty lag range {}..={}",
            lags.start(),
            lags.end()
        )));
    }
    if *lags.start() < 0 {
        return Err(Error::InvalidArgument("lags must be >= 0".into()));
    }
    let scores = lags
        .map(|k| {
            let shifted = candidate.shift(k).with_name(format!("{}_lag{k}", candidate.name()));
            let score = match DesignMatrix::from_series(response, &[&shifted], true) {
                Ok(design) => {
                    let n_obs = design.n_obs();
                    match ols_fit(&design) {
                        Ok(fit) => LagScore { lag: k, r_squared: Some(fit.r_squared), n_obs },
                        Err(_) => LagScore { lag: k, r_squared: None, n_obs },
                    }
                }
                Err(_) => LagScore { lag: k, r_squared: None, n_obs: 0 },
            };
            Ok(score)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LagScan { scores })
}
