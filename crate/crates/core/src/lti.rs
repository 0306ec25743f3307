//! Lending-capacity formulas.
//!
//! A household's maximum mortgage is bounded by the share of income lenders
//! allow for housing costs. Two products are modelled:
//!
//! * interest-only: the annual housing budget `4·I·W` must cover interest
//!   net of the tax deduction plus other costs, so the cap is
//!   `4·I·W / ((1 - deduction)·r + c)`;
//! * annuity: the monthly budget `I/3·W` is a level payment amortising the
//!   loan over `term_months` at the same effective rate.
//!
//! The household lending capacity (HLC) is their average weighted by the
//! interest-only share `m` of new mortgages. Income is quarterly throughout;
//! the ×4 and ÷3 frequency factors are fixed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{Frame, QuarterIndex, QuarterlySeries, Unit};

/// Constants of the lending-capacity calculation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LtiParams {
    /// Share of income available for housing costs ("woonquote").
    pub woonquote: f64,
    /// Marginal tax rate at which mortgage interest is deducted.
    pub deduction_rate: f64,
    /// Other annual housing costs as a fraction of the home value.
    pub cost_rate: f64,
    pub term_months: u32,
}

impl Default for LtiParams {
    fn default() -> Self {
        Self {
            woonquote: 0.30,
            deduction_rate: 0.40,
            cost_rate: 0.025,
            term_months: 360,
        }
    }
}

impl LtiParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(what.to_string()))
            }
        };
        check(self.woonquote > 0.0 && self.woonquote < 1.0, "woonquote must be in (0, 1)")?;
        check(
            (0.0..1.0).contains(&self.deduction_rate),
            "deduction_rate must be in [0, 1)",
        )?;
        check((0.0..1.0).contains(&self.cost_rate), "cost_rate must be in [0, 1)")?;
        check(self.term_months > 0, "term_months must be positive")
    }

    /// Annual carrying-cost rate `(1 - deduction)·r + c`.
    pub fn effective_rate(&self, interest_rate: f64) -> f64 {
        (1.0 - self.deduction_rate) * interest_rate + self.cost_rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HouseholdInputs {
    /// Income per quarter, euros.
    pub quarterly_income: f64,
    /// Annual nominal mortgage rate as a fraction.
    pub interest_rate: f64,
    /// Interest-only share of new mortgages.
    pub interest_only_share: f64,
}

impl HouseholdInputs {
    pub fn new(quarterly_income: f64, interest_rate: f64, interest_only_share: f64) -> Result<Self> {
        if !(quarterly_income > 0.0) {
            return Err(Error::Domain(format!(
                "quarterly income must be positive, got {quarterly_income}"
            )));
        }
        if !(interest_rate >= 0.0) {
            return Err(Error::Domain(format!(
                "interest rate must be non-negative, got {interest_rate}"
            )));
        }
        if !(0.0..=1.0).contains(&interest_only_share) {
            return Err(Error::Domain(format!(
                "interest-only share must be in [0, 1], got {interest_only_share}"
            )));
        }
        Ok(Self {
            quarterly_income,
            interest_rate,
            interest_only_share,
        })
    }
}

/// Present value of a level payment of 1 per month for `term_months` months
/// at annual rate `rate` compounded monthly. Returns `term_months` at zero.
pub fn annuity_factor(rate: f64, term_months: u32) -> Result<f64> {
    if rate < 0.0 || rate.is_nan() {
        return Err(Error::Domain(format!("annuity rate must be >= 0, got {rate}")));
    }
    if term_months == 0 {
        return Err(Error::InvalidArgument("term_months must be positive".into()));
    }
    if rate == 0.0 {
        return Ok(term_months as f64);
    }
    let monthly = rate / 12.0;
    // 1 - (1 + i)^-n, evaluated without cancellation for small i.
    let discounted = -(-(term_months as f64) * monthly.ln_1p()).exp_m1();
    Ok(discounted / monthly)
}

/// Maximum interest-only mortgage.
pub fn max_interest_only(h: &HouseholdInputs, p: &LtiParams) -> Result<f64> {
    let rate = p.effective_rate(h.interest_rate);
    if !(rate > 0.0) {
        return Err(Error::Domain(format!(
            "effective rate must be positive for an interest-only cap, got {rate}"
        )));
    }
    Ok(4.0 * h.quarterly_income * p.woonquote / rate)
}

/// Maximum annuity mortgage.
pub fn max_annuity(h: &HouseholdInputs, p: &LtiParams) -> Result<f64> {
    let rate = p.effective_rate(h.interest_rate);
    Ok(h.quarterly_income / 3.0 * p.woonquote * annuity_factor(rate, p.term_months)?)
}

/// Household lending capacity: `m·interest_only + (1 - m)·annuity`.
pub fn hlc(h: &HouseholdInputs, p: &LtiParams) -> Result<f64> {
    let m = h.interest_only_share;
    let annuity = max_annuity(h, p)?;
    if m == 0.0 {
        return Ok(annuity);
    }
    let interest_only = max_interest_only(h, p)?;
    if m == 1.0 {
        return Ok(interest_only);
    }
    Ok(m * interest_only + (1.0 - m) * annuity)
}

/// Per-quarter HLC from the frame columns `I`, `r` and `m`.
pub fn hlc_series(frame: &Frame, p: &LtiParams) -> Result<QuarterlySeries> {
    p.validate()?;
    let income = frame.column("I")?;
    let rate = frame.column("r")?;
    let share = frame.column("m")?;
    let values = income
        .values()
        .iter()
        .zip(rate.values())
        .zip(share.values())
        .map(|((i, r), m)| match (i, r, m) {
            (Some(i), Some(r), Some(m)) => HouseholdInputs::new(*i, *r, *m)
                .and_then(|h| hlc(&h, p))
                .map(Some),
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuarterlySeries::new("HLC", Unit::Euros, frame.start(), values))
}

/// Interest-only share of new mortgages in one period, from the change in
/// the interest-only share of the mortgage stock.
///
/// Movers who account for an increase of the stock share switched into
/// interest-only; the remaining movers renew pro rata to the prior stock
/// share. A decrease is attributed to movers leaving the product, floored at
/// zero.
pub fn new_mortgage_interest_only_share(
    prior_stock_share: f64,
    stock_change: f64,
    mover_share: f64,
) -> Result<f64> {
    if mover_share == 0.0 {
        if stock_change == 0.0 {
            return Ok(prior_stock_share);
        }
        return Err(Error::Inconsistent(format!(
            "stock share changed by {stock_change} with no movers"
        )));
    }
    let share = if stock_change >= 0.0 {
        let switchers = (stock_change / mover_share).min(1.0);
        switchers + (1.0 - switchers) * prior_stock_share
    } else {
        (prior_stock_share + stock_change / mover_share).max(0.0)
    };
    Ok(share.clamp(0.0, 1.0))
}

/// Interest-only share of new mortgages per quarter, from the stock share,
/// the number of market transactions and the number of households. The first
/// quarter (no prior stock) is missing.
pub fn derive_interest_only_share(
    stock_share: &QuarterlySeries,
    transactions: &QuarterlySeries,
    households: &QuarterlySeries,
) -> Result<QuarterlySeries> {
    let start = stock_share.start();
    let len = stock_share.len();
    let transactions = transactions.reindex(start, len);
    let households = households.reindex(start, len);
    let mut values = vec![None; len];
    for t in 1..len {
        let (Some(prior), Some(now), Some(tx), Some(hh)) = (
            stock_share.values()[t - 1],
            stock_share.values()[t],
            transactions.values()[t],
            households.values()[t],
        ) else {
            continue;
        };
        let quarter = start.offset(t as i64);
        if !(0.0..=1.0).contains(&prior) || !(0.0..=1.0).contains(&now) {
            return Err(Error::Inconsistent(format!(
                "stock share outside [0, 1] around {quarter}"
            )));
        }
        if !(hh > 0.0) || tx < 0.0 || tx > hh {
            return Err(Error::Inconsistent(format!(
                "{quarter}: transactions ({tx}) must be within [0, households ({hh})]"
            )));
        }
        values[t] = Some(
            new_mortgage_interest_only_share(prior, now - prior, tx / hh)
                .map_err(|e| Error::Inconsistent(format!("{quarter}: {e}")))?,
        );
    }
    Ok(QuarterlySeries::new("m", Unit::Share, start, values))
}

/// Sets the share to zero from `from` onwards, the quarter lenders had to
/// cap every mortgage at the annuity maximum.
pub fn zero_interest_only_from(m: &QuarterlySeries, from: QuarterIndex) -> QuarterlySeries {
    let values = m
        .iter()
        .map(|(q, v)| if q >= from { Some(0.0) } else { v })
        .collect();
    QuarterlySeries::new(m.name(), m.unit(), m.start(), values)
}
