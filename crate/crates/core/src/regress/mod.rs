//! Linear regression: OLS, the error correction model and the lag scan.

mod design;
mod ecm;
mod lagscan;
mod ols;

pub use design::{DesignMatrix, INTERCEPT};
pub use ecm::{ecm_fit, ecm_forecast, lagged_level_name, EcmFit, EcmSummary, ForecastMode};
pub use lagscan::{lag_scan, LagScan, LagScore};
pub use ols::{ols_fit, predict, CoefficientEstimate, FitResult, FitSummary, RANK_TOLERANCE};
