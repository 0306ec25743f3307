use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::quarter::QuarterIndex;
use crate::error::{Error, Result};

/// Measurement unit carried by every series.
///
/// Interest rates and loan-to-value ratios are stored as fractions (`0.0538`,
/// `1.013`), never as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Euros,
    Fraction,
    Share,
    Ratio,
}

impl Unit {
    /// Default unit for the well-known column names of the experiment.
    pub fn for_column(name: &str) -> Unit {
        let base = name.strip_prefix("d_").unwrap_or(name);
        let base = match base.rfind("_lag") {
            Some(pos) if base[pos + 4..].bytes().all(|b| b.is_ascii_digit()) => &base[..pos],
            _ => base,
        };
        match base {
            "HP" | "I" | "HLC" | "HLC_k" | "HLC_a" => Unit::Euros,
            "r" | "LTV" | "debt_gdp" => Unit::Fraction,
            "m" | "stock_share" | "transactions" | "households" => Unit::Share,
            _ => Unit::Ratio,
        }
    }
}

/// Contiguous quarterly observations starting at `start`; `None` marks a
/// missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarterlySeries {
    name: String,
    unit: Unit,
    start: QuarterIndex,
    values: Vec<Option<f64>>,
}

impl QuarterlySeries {
    pub fn new(
        name: impl Into<String>,
        unit: Unit,
        start: QuarterIndex,
        values: Vec<Option<f64>>,
    ) -> Self {
        Self {
            name: name.into(),
            unit,
            start,
            values,
        }
    }

    /// Series with every value present.
    pub fn from_values(
        name: impl Into<String>,
        unit: Unit,
        start: QuarterIndex,
        values: impl IntoIterator<Item = f64>,
    ) -> Self {
        Self::new(name, unit, start, values.into_iter().map(Some).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    /// Last quarter covered, `None` for an empty series.
    pub fn end(&self) -> Option<QuarterIndex> {
        (!self.values.is_empty()).then(|| self.start.offset(self.values.len() as i64 - 1))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Option<f64>> {
        self.values
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    pub fn get(&self, q: QuarterIndex) -> Option<f64> {
        let offset = self.start.quarters_until(q);
        if offset < 0 {
            return None;
        }
        self.values.get(offset as usize).copied().flatten()
    }

    pub fn iter(&self) -> impl Iterator<Item = (QuarterIndex, Option<f64>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start.offset(i as i64), *v))
    }

    /// Present observations only.
    pub fn observations(&self) -> impl Iterator<Item = (QuarterIndex, f64)> + '_ {
        self.iter().filter_map(|(q, v)| v.map(|v| (q, v)))
    }

    pub fn present_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Same series over `len` quarters from `start`; quarters outside the
    /// original range become missing.
    pub fn reindex(&self, start: QuarterIndex, len: usize) -> QuarterlySeries {
        let values = (0..len)
            .map(|i| self.get(start.offset(i as i64)))
            .collect();
        QuarterlySeries::new(self.name.clone(), self.unit, start, values)
    }

    /// Relabels every value `k` quarters later, extending the range; unlike
    /// [`lag`] no observation is dropped.
    pub fn shift(&self, k: i64) -> QuarterlySeries {
        QuarterlySeries::new(self.name.clone(), self.unit, self.start.offset(k), self.values.clone())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> QuarterlySeries {
        let values = self.values.iter().map(|v| v.map(&f)).collect();
        QuarterlySeries::new(self.name.clone(), self.unit, self.start, values)
    }

    /// Element-wise combination over the union of both ranges; missing where
    /// either side is missing.
    pub fn zip_with(
        &self,
        other: &QuarterlySeries,
        name: impl Into<String>,
        unit: Unit,
        f: impl Fn(f64, f64) -> f64,
    ) -> QuarterlySeries {
        let (start, len) = union_range([self, other]).unwrap_or((self.start, 0));
        let values = (0..len)
            .map(|i| {
                let q = start.offset(i as i64);
                match (self.get(q), other.get(q)) {
                    (Some(a), Some(b)) => Some(f(a, b)),
                    _ => None,
                }
            })
            .collect();
        QuarterlySeries::new(name, unit, start, values)
    }
}

/// Smallest `(start, len)` covering every non-empty series.
pub(crate) fn union_range<'a>(
    series: impl IntoIterator<Item = &'a QuarterlySeries>,
) -> Option<(QuarterIndex, usize)> {
    let mut bounds: Option<(QuarterIndex, QuarterIndex)> = None;
    for s in series {
        let Some(end) = s.end() else { continue };
        bounds = Some(match bounds {
            None => (s.start(), end),
            Some((lo, hi)) => (lo.min(s.start()), hi.max(end)),
        });
    }
    bounds.map(|(lo, hi)| (lo, lo.quarters_until(hi) as usize + 1))
}

/// Spreads yearly values over quarters.
///
/// Each yearly value is placed at `anchor_quarter` of its year and the
/// quarters between consecutive anchors are filled by linear interpolation.
/// The output spans Q1 of the first year to Q4 of the last year; quarters
/// outside the first and last anchor are missing.
pub fn interpolate_yearly_to_quarterly(
    name: impl Into<String>,
    unit: Unit,
    yearly: &BTreeMap<i32, f64>,
    anchor_quarter: u8,
) -> Result<QuarterlySeries> {
    if yearly.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "yearly interpolation needs at least 2 values, got {}",
            yearly.len()
        )));
    }
    let (&first_year, _) = yearly.first_key_value().expect("non-empty");
    let (&last_year, _) = yearly.last_key_value().expect("non-empty");
    let start = QuarterIndex::new(first_year, 1)?;
    let end = QuarterIndex::new(last_year, 4)?;
    let anchor = |year: i32| QuarterIndex::new(year, anchor_quarter);
    anchor(first_year)?;

    let mut values = vec![None; start.quarters_until(end) as usize + 1];
    let anchors: Vec<(QuarterIndex, f64)> = yearly
        .iter()
        .map(|(&y, &v)| anchor(y).map(|q| (q, v)))
        .collect::<Result<_>>()?;
    for pair in anchors.windows(2) {
        let (q0, v0) = pair[0];
        let (q1, v1) = pair[1];
        let steps = q0.quarters_until(q1);
        for k in 0..steps {
            let pos = start.quarters_until(q0.offset(k)) as usize;
            values[pos] = Some(if k == 0 {
                v0
            } else {
                v0 + (v1 - v0) * k as f64 / steps as f64
            });
        }
    }
    let (last_q, last_v) = *anchors.last().expect("non-empty");
    values[start.quarters_until(last_q) as usize] = Some(last_v);
    Ok(QuarterlySeries::new(name, unit, start, values))
}

/// Mean of the trailing `window` quarters ending at each position.
pub fn trailing_mean(s: &QuarterlySeries, window: usize) -> Result<QuarterlySeries> {
    if window < 1 {
        return Err(Error::InvalidArgument("trailing window must be >= 1".into()));
    }
    let values = (0..s.len())
        .map(|t| {
            if t + 1 < window {
                return None;
            }
            let slice = &s.values[t + 1 - window..=t];
            let sum = slice.iter().try_fold(0.0, |acc, v| v.map(|v| acc + v))?;
            Some(sum / window as f64)
        })
        .collect();
    Ok(QuarterlySeries::new(s.name.clone(), s.unit, s.start, values))
}

/// Carries the most recent present value forward over gaps.
pub fn forward_fill(s: &QuarterlySeries) -> Result<QuarterlySeries> {
    let mut last = match s.values.first() {
        Some(Some(v)) => *v,
        Some(None) => {
            return Err(Error::InsufficientData(format!(
                "cannot forward-fill `{}`: first value at {} is missing",
                s.name, s.start
            )))
        }
        None => return Ok(s.clone()),
    };
    let values = s
        .values
        .iter()
        .map(|v| {
            if let Some(v) = v {
                last = *v;
            }
            Some(last)
        })
        .collect();
    Ok(QuarterlySeries::new(s.name.clone(), s.unit, s.start, values))
}

/// Shifts values `k` quarters later over the same index range.
pub fn lag(s: &QuarterlySeries, k: i64) -> Result<QuarterlySeries> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("lag must be >= 0, got {k}")));
    }
    let k = k as usize;
    let values = (0..s.len())
        .map(|t| if t < k { None } else { s.values[t - k] })
        .collect();
    Ok(QuarterlySeries::new(s.name.clone(), s.unit, s.start, values))
}

/// First difference `s[t] - s[t-1]`.
pub fn diff(s: &QuarterlySeries) -> QuarterlySeries {
    let values = (0..s.len())
        .map(|t| match (t.checked_sub(1).and_then(|p| s.values[p]), s.values[t]) {
            (Some(prev), Some(cur)) => Some(cur - prev),
            _ => None,
        })
        .collect();
    QuarterlySeries::new(s.name.clone(), s.unit, s.start, values)
}
