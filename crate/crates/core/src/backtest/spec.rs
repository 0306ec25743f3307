use serde::{Deserialize, Serialize};

use crate::regress::ForecastMode;
use crate::timeseries::QuarterIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    Ols,
    Ecm,
}

impl Approach {
    pub fn label(self) -> &'static str {
        match self {
            Approach::Ols => "OLS",
            Approach::Ecm => "ECM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Fit on every available quarter.
    Full,
    /// Fit only on quarters up to the cutoff.
    Truncated,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Full => "full",
            Regime::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Level,
    /// The column divided by income `I`, e.g. HLC as a multiple of income.
    HlcOverIncome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EcmLags {
    pub diff_lag: i64,
    pub level_lag: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regressor {
    pub column: String,
    #[serde(default)]
    pub lag: i64,
    #[serde(default)]
    pub transform: Transform,
    /// ECM lags of the differenced and level terms. Defaults to
    /// `(lag, lag + 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecm_lags: Option<EcmLags>,
}

impl Regressor {
    pub fn level(column: &str, lag: i64) -> Self {
        Self {
            column: column.to_string(),
            lag,
            transform: Transform::Level,
            ecm_lags: None,
        }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_ecm_lags(mut self, diff_lag: i64, level_lag: i64) -> Self {
        self.ecm_lags = Some(EcmLags { diff_lag, level_lag });
        self
    }

    /// Name of the transformed, unlagged column.
    pub fn base_column(&self) -> String {
        match self.transform {
            Transform::Level => self.column.clone(),
            Transform::HlcOverIncome => format!("{}_I", self.column),
        }
    }

    pub fn effective_ecm_lags(&self) -> EcmLags {
        self.ecm_lags.unwrap_or(EcmLags {
            diff_lag: self.lag,
            level_lag: self.lag + 1,
        })
    }
}

/// `base` lagged by `k` quarters; the bare name at lag zero.
pub fn lagged_name(base: &str, k: i64) -> String {
    if k == 0 {
        base.to_string()
    } else {
        format!("{base}_lag{k}")
    }
}

/// First difference of `base`, lagged by `k` quarters.
pub fn diff_name(base: &str, k: i64) -> String {
    format!("d_{}", lagged_name(base, k))
}

/// One model variant: regressors plus fitting approach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    /// Specification the variant belongs to; variants of one family share a
    /// results table.
    pub family: String,
    #[serde(default = "default_response")]
    pub response: String,
    pub regressors: Vec<Regressor>,
    pub approach: Approach,
}

fn default_response() -> String {
    "HP".to_string()
}

impl ModelSpec {
    fn new(name: &str, family: &str, regressors: Vec<Regressor>, approach: Approach) -> Self {
        Self {
            name: name.to_string(),
            family: family.to_string(),
            response: default_response(),
            regressors,
            approach,
        }
    }

    /// House prices on income, interest rate and loan-to-value.
    pub fn benchmark(approach: Approach) -> Self {
        let regs = ["I", "r", "LTV"].map(|c| Regressor::level(c, 0).with_ecm_lags(0, 1));
        Self::new(&format!("benchmark_{}", suffix(approach)), "benchmark", regs.to_vec(), approach)
    }

    /// House prices on HLC lagged six quarters; the ECM uses ΔHLC lagged
    /// four and the HLC level lagged five.
    pub fn hlc(approach: Approach) -> Self {
        let reg = Regressor::level("HLC", 6).with_ecm_lags(4, 5);
        Self::new(&format!("hlc_{}", suffix(approach)), "hlc", vec![reg], approach)
    }

    /// Benchmark regressors plus HLC as a multiple of income.
    pub fn benchmark_hlc(approach: Approach) -> Self {
        let mut regs: Vec<Regressor> = ["I", "r", "LTV"]
            .map(|c| Regressor::level(c, 0).with_ecm_lags(0, 1))
            .to_vec();
        regs.push(
            Regressor::level("HLC", 6)
                .with_transform(Transform::HlcOverIncome)
                .with_ecm_lags(4, 5),
        );
        Self::new(&format!("benchmark_hlc_{}", suffix(approach)), "benchmark_hlc", regs, approach)
    }

    /// Benchmark with mortgage debt-to-GDP added; needs a `debt_gdp` column.
    pub fn benchmark_debt(approach: Approach) -> Self {
        let regs = ["I", "r", "LTV", "debt_gdp"].map(|c| Regressor::level(c, 0).with_ecm_lags(0, 1));
        Self::new(&format!("benchmark_debt_{}", suffix(approach)), "benchmark_debt", regs.to_vec(), approach)
    }

    /// The six variants of the three specifications.
    pub fn default_grid() -> Vec<ModelSpec> {
        let mut out = Vec::new();
        for family in [Self::benchmark, Self::hlc, Self::benchmark_hlc] {
            out.push(family(Approach::Ols));
            out.push(family(Approach::Ecm));
        }
        out
    }

    /// Looks up a built-in variant by name, e.g. `hlc_ols`.
    pub fn preset(name: &str) -> Option<ModelSpec> {
        let (family, approach) = name.rsplit_once('_')?;
        let approach = match approach {
            "ols" => Approach::Ols,
            "ecm" => Approach::Ecm,
            _ => return None,
        };
        let make = match family {
            "benchmark" => Self::benchmark,
            "hlc" => Self::hlc,
            "benchmark_hlc" => Self::benchmark_hlc,
            "benchmark_debt" => Self::benchmark_debt,
            _ => return None,
        };
        Some(make(approach))
    }
}

fn suffix(approach: Approach) -> &'static str {
    match approach {
        Approach::Ols => "ols",
        Approach::Ecm => "ecm",
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationWindow {
    /// Every quarter with a prediction.
    #[default]
    AllQuarters,
    /// Only quarters after the cutoff.
    HoldoutOnly,
}

/// Training split for the out-of-sample regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    /// Last quarter used for fitting in the truncated regime.
    pub cutoff: QuarterIndex,
    /// Window used for headline tables; both are always computed.
    pub evaluation_window: EvaluationWindow,
    /// How truncated ECM fits forecast past the cutoff.
    pub ecm_forecast: ForecastMode,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            cutoff: QuarterIndex::new(2008, 2).expect("valid quarter"),
            evaluation_window: EvaluationWindow::AllQuarters,
            ecm_forecast: ForecastMode::Dynamic,
        }
    }
}
