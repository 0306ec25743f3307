//! Error correction model.
//!
//! The model
//!
//! ```text
//! Δy_t = b0 + Σ b_j Δx_j + γ (y_{t-1} - Σ α_j x_j)
//! ```
//!
//! is linear once the long-run term is expanded, so it is estimated as
//!
//! ```text
//! Δy_t = b0 + Σ b_j Δx_j + γ y_{t-1} + Σ θ_j x_j
//! ```
//!
//! by OLS and the long-run coefficients are recovered as `α_j = -θ_j / γ`.
//! The short-run and level regressors arrive already differenced and lagged;
//! their lag structure is chosen by the caller.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use super::ols::{ols_fit, FitResult, FitSummary};
use crate::error::{Error, Result};
use crate::timeseries::{align, diff, lag, Frame, QuarterIndex, QuarterlySeries, Unit};

#[derive(Debug, Clone)]
pub struct EcmFit {
    response: String,
    intercept: f64,
    short_run: Vec<(String, f64)>,
    gamma: f64,
    levels: Vec<(String, f64)>,
    long_run: Vec<(String, f64)>,
    underlying: FitResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastMode {
    /// One step ahead from the observed previous level.
    Static,
    /// Recursive: each step builds on the previous predicted level.
    Dynamic,
}

/// Serializable ECM table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmSummary {
    pub gamma: f64,
    pub long_run: IndexMap<String, f64>,
    #[serde(flatten)]
    pub fit: FitSummary,
}

/// Name of the lagged response level regressor for `response`.
pub fn lagged_level_name(response: &str) -> String {
    format!("{response}_lag1")
}

impl EcmFit {
    pub fn response_name(&self) -> &str {
        &self.response
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    /// Coefficients on the differenced regressors.
    pub fn short_run(&self) -> &[(String, f64)] {
        &self.short_run
    }

    /// Adjustment speed toward the long-run relation; negative when stable.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Unrestricted coefficients on the level regressors.
    pub fn level_coefficients(&self) -> &[(String, f64)] {
        &self.levels
    }

    pub fn long_run(&self) -> &[(String, f64)] {
        &self.long_run
    }

    pub fn underlying(&self) -> &FitResult {
        &self.underlying
    }

    pub fn summary(&self) -> EcmSummary {
        EcmSummary {
            gamma: self.gamma,
            long_run: self.long_run.iter().cloned().collect(),
            fit: self.underlying.summary(),
        }
    }

    /// Predicted change from the unrestricted parametrization.
    pub fn delta(&self, short_run: &[f64], prev_level: f64, levels: &[f64]) -> f64 {
        let short: f64 = self.short_run.iter().zip(short_run).map(|((_, b), x)| b * x).sum();
        let level: f64 = self.levels.iter().zip(levels).map(|((_, t), x)| t * x).sum();
        self.intercept + short + self.gamma * prev_level + level
    }

    /// Predicted change from the error-correction form with the recovered
    /// long-run coefficients.
    pub fn restricted_delta(&self, short_run: &[f64], prev_level: f64, levels: &[f64]) -> f64 {
        let short: f64 = self.short_run.iter().zip(short_run).map(|((_, b), x)| b * x).sum();
        let equilibrium: f64 = self.long_run.iter().zip(levels).map(|((_, a), x)| a * x).sum();
        self.intercept + short + self.gamma * (prev_level - equilibrium)
    }
}

/// Fits the ECM of `response` on the given short-run and level regressors.
/// Rows with any missing input are dropped.
pub fn ecm_fit(response: &QuarterlySeries, short_run_terms: &Frame, level_terms: &Frame) -> Result<EcmFit> {
    let name = response.name().to_string();
    let delta = diff(response).with_name(format!("d_{name}"));
    let prev = lag(response, 1)?.with_name(lagged_level_name(&name));
    let columns = short_run_terms
        .columns()
        .iter()
        .cloned()
        .chain(std::iter::once(prev))
        .chain(level_terms.columns().iter().cloned());
    let regressors = align(columns)?;
    let design = DesignMatrix::from_frame(&delta, &regressors, true)?;
    let fit = ols_fit(&design)?;

    let coef = |n: &str| fit.coefficient(n).expect("fitted column");
    let gamma = coef(&lagged_level_name(&name));
    if gamma == 0.0 {
        return Err(Error::ZeroAdjustment);
    }
    if gamma >= 0.0 {
        log::warn!("ECM for `{name}`: adjustment coefficient {gamma} is not negative");
    }
    let short_run = short_run_terms
        .names()
        .map(|n| (n.to_string(), coef(n)))
        .collect();
    let levels: Vec<(String, f64)> = level_terms
        .names()
        .map(|n| (n.to_string(), coef(n)))
        .collect();
    let long_run = levels.iter().map(|(n, t)| (n.clone(), -t / gamma)).collect();
    Ok(EcmFit {
        response: name,
        intercept: fit.intercept(),
        short_run,
        gamma,
        levels,
        long_run,
        underlying: fit,
    })
}

fn row(frame: &Frame, names: &[(String, f64)], t: usize) -> Result<Option<Vec<f64>>> {
    names
        .iter()
        .map(|(n, _)| frame.column(n).map(|c| c.values()[t]))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().collect())
}

/// Level forecasts of the response from `start` to the end of `frame`.
///
/// `frame` must hold the response column and every short-run and level
/// regressor. Static mode adds each predicted change to the observed previous
/// level; dynamic mode adds it to the previous prediction, starting from the
/// observed level at `start - 1`. A dynamic forecast stops at the first
/// quarter with a missing regressor.
pub fn ecm_forecast(fit: &EcmFit, frame: &Frame, start: QuarterIndex, mode: ForecastMode) -> Result<QuarterlySeries> {
    let observed = frame.column(&fit.response)?;
    let initial = observed.get(start.pred()).ok_or_else(|| {
        Error::InsufficientData(format!(
            "no observed `{}` at {} to start the forecast",
            fit.response,
            start.pred()
        ))
    })?;
    let first = frame.start().quarters_until(start);
    if first < 0 {
        return Err(Error::InvalidArgument(format!(
            "forecast start {start} precedes the frame start {}",
            frame.start()
        )));
    }
    let mut values = vec![None; frame.len()];
    let mut level = initial;
    for t in first as usize..frame.len() {
        let prev = match mode {
            ForecastMode::Static => match t.checked_sub(1).and_then(|p| observed.values()[p]) {
                Some(v) => v,
                None => continue,
            },
            ForecastMode::Dynamic => level,
        };
        let (Some(short), Some(levels)) = (row(frame, &fit.short_run, t)?, row(frame, &fit.levels, t)?) else {
            match mode {
                ForecastMode::Static => continue,
                ForecastMode::Dynamic => break,
            }
        };
        level = prev + fit.delta(&short, prev, &levels);
        values[t] = Some(level);
    }
    Ok(QuarterlySeries::new(
        format!("{}_forecast", fit.response),
        Unit::for_column(&fit.response),
        frame.start(),
        values,
    ))
}
