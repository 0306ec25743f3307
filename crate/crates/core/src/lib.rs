//! Household lending capacity (HLC) and the house-price forecasting
//! experiment built on it.
//!
//! * [`timeseries`]: quarterly series, frames and data preparation.
//! * [`lti`]: loan-to-income formulas and the HLC measure.
//! * [`regress`]: OLS, error correction models, lag selection.
//! * [`backtest`]: model grid, in-sample and out-of-sample scoring.
//! * [`synthetic`]: seeded datasets with a known generating process.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod backtest;
pub mod error;
pub mod lti;
pub mod regress;
pub mod synthetic;
pub mod timeseries;

pub use backtest::{
    build_features, evaluate, run_grid, BacktestReport, FeatureConfig, Metrics, ModelSpec, SplitSpec,
};
pub use error::{Error, ErrorKind, Result};
pub use lti::{hlc, hlc_series, HouseholdInputs, LtiParams};
pub use regress::{ecm_fit, ols_fit, DesignMatrix, EcmFit, FitResult, ForecastMode};
pub use timeseries::{Frame, QuarterIndex, QuarterlySeries, Unit};
