//! Shared fixtures for the benchmarks.

use hlc_core::backtest::build_features;
use hlc_core::synthetic::{generate, ScenarioConfig};
use hlc_core::{DesignMatrix, FeatureConfig, Frame, LtiParams};

/// Feature frame of the default synthetic scenario with the given seed.
pub fn synthetic_features(seed: u64) -> Frame {
    let scenario = generate(&ScenarioConfig { seed, ..ScenarioConfig::default() }).expect("valid scenario");
    build_features(&scenario.frame, &LtiParams::default(), &FeatureConfig::default()).expect("features")
}

/// House price on lagged HLC, the single-regressor fit used across the grid.
pub fn hlc_design(features: &Frame) -> DesignMatrix {
    let x = features.select(&["HLC_lag6"]).expect("HLC_lag6 column");
    DesignMatrix::from_frame(features.column("HP").expect("HP column"), &x, true).expect("design")
}
