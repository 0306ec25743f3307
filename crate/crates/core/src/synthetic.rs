//! Seeded datasets shaped like the Dutch housing market from 1995 on: rising
//! incomes, falling rates, an interest-only share that ramps up and is then
//! regulated away, and house prices that follow HLC with a six-quarter lag.
//!
//! Prices are generated as `HP_t = (a + b * HLC_{t-6}) * (1 + s * u_t)` with
//! `u_t` uniform on `[-1, 1]` and HLC computed exactly as
//! [`build_features`](crate::backtest::build_features) does with default
//! parameters, so a noiseless scenario is fitted without error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backtest::FeatureConfig;
use crate::error::{Error, Result};
use crate::lti::{hlc_series, LtiParams};
use crate::timeseries::{align, trailing_mean, Frame, QuarterIndex, QuarterlySeries, Unit};

/// Price level the HLC range is mapped onto.
const HP_RANGE: (f64, f64) = (90_000.0, 267_000.0);
pub const MIN_QUARTERS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_quarters: usize,
    /// Half-width of the multiplicative price noise.
    pub noise_scale: f64,
    /// First quarter without interest-only lending.
    pub regime_change_quarter: QuarterIndex,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_quarters: 92,
            noise_scale: 0.01,
            regime_change_quarter: QuarterIndex::new(2011, 1).expect("valid quarter"),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_quarters < MIN_QUARTERS {
            return Err(Error::InvalidArgument(format!(
                "n_quarters must be at least {MIN_QUARTERS}, got {}",
                self.n_quarters
            )));
        }
        if !(0.0..1.0).contains(&self.noise_scale) {
            return Err(Error::InvalidArgument(format!(
                "noise_scale must be in [0, 1), got {}",
                self.noise_scale
            )));
        }
        Ok(())
    }
}

/// Generating coefficients of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub intercept: f64,
    pub hlc_coefficient: f64,
    pub hlc_lag: i64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    /// Columns `HP`, `I`, `r`, `LTV`, `m`.
    pub frame: Frame,
    pub truth: Truth,
}

pub fn start_quarter() -> QuarterIndex {
    QuarterIndex::new(1995, 1).expect("valid quarter")
}

fn adoption_start() -> QuarterIndex {
    QuarterIndex::new(1996, 1).expect("valid quarter")
}

fn adoption_peak() -> QuarterIndex {
    QuarterIndex::new(2008, 1).expect("valid quarter")
}

fn interest_only_share(q: QuarterIndex, regime_change: QuarterIndex) -> f64 {
    if q < adoption_start() || q >= regime_change {
        return 0.0;
    }
    let span = adoption_start().quarters_until(adoption_peak()) as f64;
    let progress = (adoption_start().quarters_until(q) as f64 / span).min(1.0);
    0.10 + (0.463 - 0.10) * progress
}

fn loan_to_value(year: i32) -> f64 {
    let peak = 2008;
    if year <= peak {
        0.80 + 0.02 * (year - 1995) as f64
    } else {
        1.06 - 0.015 * (year - peak) as f64
    }
}

/// Generates a scenario; identical configs give identical output.
pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_quarters;
    let q0 = start_quarter();
    let quarters: Vec<QuarterIndex> = (0..n).map(|t| q0.offset(t as i64)).collect();

    let mut income = Vec::with_capacity(n);
    let mut rate = Vec::with_capacity(n);
    let mut share = Vec::with_capacity(n);
    let mut ltv = Vec::with_capacity(n);
    let mut yearly_ltv = None;
    for (t, &q) in quarters.iter().enumerate() {
        let season = if q.quarter() == 4 { 1.08 } else { 0.9733 };
        income.push(13_000.0 * 1.0055f64.powi(t as i32) * season * (1.0 + 0.01 * rng.random_range(-1.0..=1.0)));

        let progress = t as f64 / (n - 1) as f64;
        let r = 0.084 + (0.0284 - 0.084) * progress + 0.002 * rng.random_range(-1.0..=1.0);
        rate.push(r.clamp(0.02, 0.09));

        let m = interest_only_share(q, cfg.regime_change_quarter);
        let wiggle = if m > 0.0 { 0.01 * rng.random_range(-1.0..=1.0) } else { 0.0 };
        share.push((m + wiggle).clamp(0.0, 0.5));

        if q.quarter() == 1 || yearly_ltv.is_none() {
            yearly_ltv = Some(loan_to_value(q.year()) + 0.005 * rng.random_range(-1.0..=1.0));
        }
        ltv.push(if t + 4 < n { yearly_ltv } else { None });
    }

    let raw = align([
        QuarterlySeries::from_values("I", Unit::Euros, q0, income),
        QuarterlySeries::from_values("r", Unit::Fraction, q0, rate),
        QuarterlySeries::new("LTV", Unit::Fraction, q0, ltv),
        QuarterlySeries::from_values("m", Unit::Share, q0, share),
    ])?;

    // HLC as the feature pipeline will see it.
    let window = FeatureConfig::default().smoothing_window;
    let mut smoothed = raw.clone();
    smoothed.upsert(trailing_mean(raw.column("I")?, window)?);
    smoothed.upsert(trailing_mean(raw.column("r")?, window)?);
    let hlc = hlc_series(&smoothed, &LtiParams::default())?;

    let lag = 6usize;
    let first = window - 1;
    let at = |t: usize| hlc.values()[t.saturating_sub(lag).max(first)].expect("smoothed HLC present");
    let used: Vec<f64> = (first..n - lag).map(|t| hlc.values()[t].expect("present")).collect();
    let lo = used.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = used.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slope = (HP_RANGE.1 - HP_RANGE.0) / (hi - lo);
    let intercept = HP_RANGE.0 - slope * lo;

    let hp = (0..n).map(|t| {
        let u: f64 = rng.random_range(-1.0..=1.0);
        (intercept + slope * at(t)) * (1.0 + cfg.noise_scale * u)
    });
    let mut frame = align([QuarterlySeries::from_values("HP", Unit::Euros, q0, hp.collect::<Vec<_>>())])?;
    for c in raw.columns() {
        frame.insert(c.clone())?;
    }
    Ok(Scenario {
        frame,
        truth: Truth {
            intercept,
            hlc_coefficient: slope,
            hlc_lag: lag as i64,
        },
    })
}
