use serde::{Deserialize, Serialize};

use super::spec::{diff_name, lagged_name};
use crate::error::{Error, Result};
use crate::lti::{derive_interest_only_share, hlc_series, zero_interest_only_from, LtiParams};
use crate::timeseries::{diff, forward_fill, lag, trailing_mean, Frame, QuarterIndex, QuarterlySeries, Unit};

/// Data-preparation knobs for [`build_features`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    /// Trailing window (quarters) for smoothing income and interest rates.
    pub smoothing_window: usize,
    /// Lag of HLC in the OLS specifications.
    pub hlc_lag: i64,
    /// Lag of ΔHLC in the ECM specifications.
    pub ecm_diff_lag: i64,
    /// Lag of the HLC level in the ECM specifications.
    pub ecm_level_lag: i64,
    /// Interest-only share forced to zero from this quarter on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interest_only_zero_from: Option<QuarterIndex>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            smoothing_window: 4,
            hlc_lag: 6,
            ecm_diff_lag: 4,
            ecm_level_lag: 5,
            interest_only_zero_from: None,
        }
    }
}

/// Forward-fills from the first present value on; earlier quarters stay
/// missing.
fn fill_after_first(s: &QuarterlySeries) -> Result<QuarterlySeries> {
    let Some(first) = s.values().iter().position(Option::is_some) else {
        return Ok(s.clone());
    };
    let start = s.start().offset(first as i64);
    let tail = s.reindex(start, s.len() - first);
    Ok(forward_fill(&tail)?.reindex(s.start(), s.len()))
}

fn interest_only_share(raw: &Frame) -> Result<QuarterlySeries> {
    if let Ok(m) = raw.column("m") {
        return Ok(m.clone());
    }
    let parts = ["stock_share", "transactions", "households"];
    if parts.iter().all(|c| raw.has_column(c)) {
        return derive_interest_only_share(
            raw.column("stock_share")?,
            raw.column("transactions")?,
            raw.column("households")?,
        );
    }
    Err(Error::MissingColumn(
        "m (or stock_share, transactions and households to derive it)".into(),
    ))
}

/// Builds the regression inputs from raw series.
///
/// `raw` must contain `HP`, `I`, `r` and `LTV`, plus either `m` or the
/// columns it is derived from. Income and rates are replaced by their
/// trailing means, `LTV` is forward-filled and `m` is zeroed from the
/// configured quarter. Adds `HLC`, `HLC_I` (HLC over income) and the lagged
/// columns used by the default specifications. Other columns pass through.
pub fn build_features(raw: &Frame, p: &LtiParams, cfg: &FeatureConfig) -> Result<Frame> {
    p.validate()?;
    for col in ["HP", "I", "r", "LTV"] {
        raw.column(col)?;
    }
    let mut out = raw.clone();
    out.upsert(trailing_mean(raw.column("I")?, cfg.smoothing_window)?);
    out.upsert(trailing_mean(raw.column("r")?, cfg.smoothing_window)?);
    out.upsert(fill_after_first(raw.column("LTV")?)?);

    let mut m = interest_only_share(raw)?.with_name("m").reindex(out.start(), out.len());
    if let Some(from) = cfg.interest_only_zero_from {
        m = zero_interest_only_from(&m, from);
    }
    out.upsert(m);

    let hlc = hlc_series(&out, p)?;
    let ratio = hlc.zip_with(out.column("I")?, "HLC_I", Unit::Ratio, |h, i| h / i);
    out.upsert(hlc.clone());
    out.upsert(ratio.clone());

    for base in [&hlc, &ratio] {
        let name = base.name();
        out.upsert(lag(base, cfg.hlc_lag)?.with_name(lagged_name(name, cfg.hlc_lag)));
        out.upsert(lag(&diff(base), cfg.ecm_diff_lag)?.with_name(diff_name(name, cfg.ecm_diff_lag)));
        out.upsert(lag(base, cfg.ecm_level_lag)?.with_name(lagged_name(name, cfg.ecm_level_lag)));
    }
    Ok(out)
}
