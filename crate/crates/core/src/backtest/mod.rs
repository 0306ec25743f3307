//! The forecasting experiment: feature construction, the model grid under
//! full-sample and truncated-sample fits, scoring and report output.

mod features;
mod grid;
mod metrics;
mod report;
mod spec;

pub use features::{build_features, FeatureConfig};
pub use grid::{run_grid, AlternateMetrics, BacktestReport, FitStats, VariantReport, SCHEMA_VERSION};
pub use metrics::{evaluate, Metrics, Window};
pub use report::{emit_plot_data, render_tables, summary_csv};
pub use spec::{
    diff_name, lagged_name, Approach, EcmLags, EvaluationWindow, ModelSpec, Regime, Regressor, SplitSpec, Transform,
};
