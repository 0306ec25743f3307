use std::collections::BTreeSet;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, Metrics, Window};
use super::spec::{diff_name, lagged_name, Approach, EvaluationWindow, ModelSpec, Regime, SplitSpec};
use crate::error::{Error, Result};
use crate::regress::{
    ecm_fit, ecm_forecast, ols_fit, predict, CoefficientEstimate, DesignMatrix, EcmFit, FitSummary, ForecastMode,
};
use crate::timeseries::{align, diff, lag, Frame, QuarterIndex, QuarterlySeries};

pub const SCHEMA_VERSION: u32 = 1;

/// Goodness of fit of the estimated equation (for an ECM, of the change
/// equation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub r2: f64,
    pub adj_r2: f64,
    pub resid_se: f64,
    pub f_stat: Option<f64>,
    pub n: usize,
}

/// Scores of the forecast mode not used for the headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternateMetrics {
    pub forecast_mode: ForecastMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_all: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_holdout: Option<Metrics>,
}

/// Outcome of one spec under one regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub name: String,
    pub family: String,
    pub approach: Approach,
    pub regime: Regime,
    /// Last quarter that entered the fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_end: Option<QuarterIndex>,
    /// How post-training quarters were predicted (ECM only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forecast_mode: Option<ForecastMode>,
    /// Scored over every quarter with a prediction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_all: Option<Metrics>,
    /// Scored over quarters after the cutoff only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_holdout: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate: Option<AlternateMetrics>,
    #[serde(default)]
    pub coefficients: IndexMap<String, CoefficientEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub long_run: Option<IndexMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub observed: Option<QuarterlySeries>,
    #[serde(skip)]
    pub predicted: Option<QuarterlySeries>,
}

impl VariantReport {
    /// Metrics under `window`.
    pub fn metrics(&self, window: EvaluationWindow) -> Option<Metrics> {
        match window {
            EvaluationWindow::AllQuarters => self.metrics_all,
            EvaluationWindow::HoldoutOnly => self.metrics_holdout,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub schema_version: u32,
    pub cutoff: QuarterIndex,
    /// Window behind the headline tables; both are stored per variant.
    pub evaluation_window: EvaluationWindow,
    pub ecm_forecast: ForecastMode,
    /// Families in the order they were requested.
    pub families: Vec<String>,
    /// Sorted by name, then regime.
    pub variants: Vec<VariantReport>,
}

impl BacktestReport {
    pub fn variant(&self, name: &str, regime: Regime) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.name == name && v.regime == regime)
    }

    /// Deterministic pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: BacktestReport =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("report JSON: {e}")))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported report schema_version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }
}

fn source(features: &Frame, base: &str) -> Result<QuarterlySeries> {
    Ok(features.column(base)?.clone())
}

fn ols_columns(features: &Frame, spec: &ModelSpec) -> Result<Frame> {
    let cols = spec
        .regressors
        .iter()
        .map(|r| {
            let base = r.base_column();
            Ok(lag(&source(features, &base)?, r.lag)?.with_name(lagged_name(&base, r.lag)))
        })
        .collect::<Result<Vec<_>>>()?;
    align(cols)
}

fn ecm_columns(features: &Frame, spec: &ModelSpec) -> Result<(Frame, Frame)> {
    let mut short = Vec::new();
    let mut levels = Vec::new();
    for r in &spec.regressors {
        let base = r.base_column();
        let s = source(features, &base)?;
        let lags = r.effective_ecm_lags();
        short.push(lag(&diff(&s), lags.diff_lag)?.with_name(diff_name(&base, lags.diff_lag)));
        levels.push(lag(&s, lags.level_lag)?.with_name(lagged_name(&base, lags.level_lag)));
    }
    Ok((align(short)?, align(levels)?))
}

/// Response with every value after `cutoff` removed.
fn truncate(s: &QuarterlySeries, cutoff: QuarterIndex) -> QuarterlySeries {
    let values = s.iter().map(|(q, v)| if q <= cutoff { v } else { None }).collect();
    QuarterlySeries::new(s.name(), s.unit(), s.start(), values)
}

fn training_response(observed: &QuarterlySeries, regime: Regime, cutoff: QuarterIndex) -> QuarterlySeries {
    match regime {
        Regime::Full => observed.clone(),
        Regime::Truncated => truncate(observed, cutoff),
    }
}

/// Guards the truncated regime against look-ahead.
fn audit_rows(rows: &[QuarterIndex], regime: Regime, cutoff: QuarterIndex) -> Result<Option<QuarterIndex>> {
    let last = rows.iter().max().copied();
    if regime == Regime::Truncated && last.is_some_and(|q| q > cutoff) {
        return Err(Error::Inconsistent(format!(
            "truncated fit used quarters after the cutoff {cutoff}"
        )));
    }
    Ok(last)
}

/// Joins two partial series; `later` wins from `from` onwards.
fn splice(earlier: &QuarterlySeries, later: &QuarterlySeries, from: QuarterIndex) -> QuarterlySeries {
    let values = earlier
        .iter()
        .map(|(q, v)| if q >= from { later.get(q) } else { v })
        .collect();
    QuarterlySeries::new(earlier.name(), earlier.unit(), earlier.start(), values)
}

fn score(observed: &QuarterlySeries, predicted: &QuarterlySeries, cutoff: QuarterIndex) -> (Option<Metrics>, Option<Metrics>) {
    (
        evaluate(observed, predicted, Window::All).ok(),
        evaluate(observed, predicted, Window::After(cutoff)).ok(),
    )
}

fn fit_stats(s: &FitSummary) -> FitStats {
    FitStats {
        r2: s.r2,
        adj_r2: s.adj_r2,
        resid_se: s.resid_se,
        f_stat: s.f_stat,
        n: s.n,
    }
}

struct Outcome {
    train_end: Option<QuarterIndex>,
    forecast_mode: Option<ForecastMode>,
    predicted: QuarterlySeries,
    alternate: Option<(ForecastMode, QuarterlySeries)>,
    summary: FitSummary,
    ecm: Option<EcmFit>,
}

fn run_ols(features: &Frame, spec: &ModelSpec, observed: &QuarterlySeries, regime: Regime, cutoff: QuarterIndex) -> Result<Outcome> {
    let regressors = ols_columns(features, spec)?;
    let response = training_response(observed, regime, cutoff);
    let fit = ols_fit(&DesignMatrix::from_frame(&response, &regressors, true)?)?;
    let train_end = audit_rows(fit.rows(), regime, cutoff)?;
    Ok(Outcome {
        train_end,
        forecast_mode: None,
        predicted: predict(&fit, &regressors)?,
        alternate: None,
        summary: fit.summary(),
        ecm: None,
    })
}

fn other(mode: ForecastMode) -> ForecastMode {
    match mode {
        ForecastMode::Static => ForecastMode::Dynamic,
        ForecastMode::Dynamic => ForecastMode::Static,
    }
}

fn run_ecm(
    features: &Frame,
    spec: &ModelSpec,
    observed: &QuarterlySeries,
    regime: Regime,
    split: &SplitSpec,
) -> Result<Outcome> {
    let cutoff = split.cutoff;
    let (short, levels) = ecm_columns(features, spec)?;
    let response = training_response(observed, regime, cutoff);
    let fit = ecm_fit(&response, &short, &levels)?;
    let train_end = audit_rows(fit.underlying().rows(), regime, cutoff)?;

    let frame = align(
        std::iter::once(observed.clone())
            .chain(short.columns().iter().cloned())
            .chain(levels.columns().iter().cloned()),
    )?;
    let first = observed
        .observations()
        .next()
        .map(|(q, _)| q.succ())
        .ok_or_else(|| Error::InsufficientData(format!("`{}` has no observations", observed.name())))?;
    let in_sample = ecm_forecast(&fit, &frame, first, ForecastMode::Static)?;
    let (predicted, forecast_mode, alternate) = match regime {
        Regime::Full => (in_sample, None, None),
        Regime::Truncated => {
            let mode = split.ecm_forecast;
            let start = cutoff.succ();
            let headline = ecm_forecast(&fit, &frame, start, mode)?;
            let alt = ecm_forecast(&fit, &frame, start, other(mode))?;
            (
                splice(&in_sample, &headline, start),
                Some(mode),
                Some((other(mode), splice(&in_sample, &alt, start))),
            )
        }
    };
    Ok(Outcome {
        train_end,
        forecast_mode,
        predicted,
        alternate,
        summary: fit.underlying().summary(),
        ecm: Some(fit),
    })
}

fn run_variant(features: &Frame, spec: &ModelSpec, regime: Regime, split: &SplitSpec) -> VariantReport {
    let mut report = VariantReport {
        name: spec.name.clone(),
        family: spec.family.clone(),
        approach: spec.approach,
        regime,
        train_end: None,
        forecast_mode: None,
        metrics_all: None,
        metrics_holdout: None,
        alternate: None,
        coefficients: IndexMap::new(),
        fit: None,
        gamma: None,
        long_run: None,
        error: None,
        observed: None,
        predicted: None,
    };
    let observed = match features.column(&spec.response) {
        Ok(o) => o.clone(),
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let outcome = match spec.approach {
        Approach::Ols => run_ols(features, spec, &observed, regime, split.cutoff),
        Approach::Ecm => run_ecm(features, spec, &observed, regime, split),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            log::warn!("variant {} ({}) failed: {e}", spec.name, regime.label());
            report.error = Some(e.to_string());
            report.observed = Some(observed);
            return report;
        }
    };
    (report.metrics_all, report.metrics_holdout) = score(&observed, &outcome.predicted, split.cutoff);
    if report.metrics_all.is_none() {
        report.error = Some("no quarter with both an observation and a prediction".into());
    }
    report.alternate = outcome.alternate.map(|(mode, series)| {
        let (all, holdout) = score(&observed, &series, split.cutoff);
        AlternateMetrics {
            forecast_mode: mode,
            metrics_all: all,
            metrics_holdout: holdout,
        }
    });
    report.train_end = outcome.train_end;
    report.forecast_mode = outcome.forecast_mode;
    report.fit = Some(fit_stats(&outcome.summary));
    report.coefficients = outcome.summary.coefficients;
    if let Some(ecm) = outcome.ecm {
        report.gamma = Some(ecm.gamma());
        report.long_run = Some(ecm.long_run().iter().cloned().collect());
    }
    report.observed = Some(observed);
    report.predicted = Some(outcome.predicted.with_name("fitted_or_forecast"));
    report
}

fn validate(features: &Frame, specs: &[ModelSpec], split: &SplitSpec) -> Result<()> {
    let end = features
        .end()
        .ok_or_else(|| Error::InsufficientData("empty feature frame".into()))?;
    if split.cutoff < features.start() || split.cutoff >= end {
        return Err(Error::InvalidArgument(format!(
            "cutoff {} must lie in [{}, {}) so quarters remain for the holdout",
            split.cutoff,
            features.start(),
            end
        )));
    }
    if specs.is_empty() {
        return Err(Error::InvalidArgument("no model specifications".into()));
    }
    let mut seen = BTreeSet::new();
    for s in specs {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::InvalidArgument(format!("duplicate spec name `{}`", s.name)));
        }
        if s.regressors.is_empty() {
            return Err(Error::InvalidArgument(format!("spec `{}` has no regressors", s.name)));
        }
    }
    Ok(())
}

/// Fits every spec on the full sample and on quarters up to the cutoff, and
/// scores the predictions against the response.
///
/// A failing variant is recorded with its error; the others still run.
/// Variants run in parallel and are sorted by name, then regime.
pub fn run_grid(features: &Frame, specs: &[ModelSpec], split: &SplitSpec) -> Result<BacktestReport> {
    validate(features, specs, split)?;
    let tasks: Vec<(&ModelSpec, Regime)> = specs
        .iter()
        .flat_map(|s| [(s, Regime::Full), (s, Regime::Truncated)])
        .collect();
    let mut variants: Vec<VariantReport> = tasks
        .into_par_iter()
        .map(|(spec, regime)| run_variant(features, spec, regime, split))
        .collect();
    variants.sort_by(|a, b| (&a.name, a.regime).cmp(&(&b.name, b.regime)));

    let mut families: Vec<String> = Vec::new();
    for s in specs {
        if !families.contains(&s.family) {
            families.push(s.family.clone());
        }
    }
    Ok(BacktestReport {
        schema_version: SCHEMA_VERSION,
        cutoff: split.cutoff,
        evaluation_window: split.evaluation_window,
        ecm_forecast: split.ecm_forecast,
        families,
        variants,
    })
}
