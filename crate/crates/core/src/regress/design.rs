use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::timeseries::{Frame, QuarterIndex, QuarterlySeries};

pub const INTERCEPT: &str = "const";

/// Response vector and regressor matrix over the quarters where every input
/// is present (listwise deletion).
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    response_name: String,
    response: DVector<f64>,
    regressors: DMatrix<f64>,
    names: Vec<String>,
    rows: Vec<QuarterIndex>,
    intercept: bool,
}

impl DesignMatrix {
    /// Builds the design from `response` and every column of `regressors`.
    /// With `intercept`, a leading column of ones named `const` is added.
    pub fn from_frame(response: &QuarterlySeries, regressors: &Frame, intercept: bool) -> Result<Self> {
        let columns: Vec<&QuarterlySeries> = regressors.columns().iter().collect();
        Self::from_series(response, &columns, intercept)
    }

    pub fn from_series(
        response: &QuarterlySeries,
        regressors: &[&QuarterlySeries],
        intercept: bool,
    ) -> Result<Self> {
        let mut names = Vec::with_capacity(regressors.len() + intercept as usize);
        if intercept {
            names.push(INTERCEPT.to_string());
        }
        for r in regressors {
            if names.iter().any(|n| n == r.name()) {
                return Err(Error::DuplicateColumn(r.name().to_string()));
            }
            names.push(r.name().to_string());
        }

        let mut rows = Vec::new();
        let mut y = Vec::new();
        let mut cells = Vec::new();
        for (q, value) in response.observations() {
            let row: Option<Vec<f64>> = regressors.iter().map(|r| r.get(q)).collect();
            let Some(row) = row else { continue };
            rows.push(q);
            y.push(value);
            if intercept {
                cells.push(1.0);
            }
            cells.extend(row);
        }
        let n = rows.len();
        let p = names.len();
        if p == 0 {
            return Err(Error::InvalidArgument("design has no columns".into()));
        }
        if n < p + 1 {
            return Err(Error::InsufficientData(format!(
                "{n} complete observations for {p} parameters of `{}`",
                response.name()
            )));
        }
        Ok(Self {
            response_name: response.name().to_string(),
            response: DVector::from_vec(y),
            regressors: DMatrix::from_row_slice(n, p, &cells),
            names,
            rows,
            intercept,
        })
    }

    /// Design from raw vectors, mostly for tests and oracles.
    pub fn from_columns(
        response: Vec<f64>,
        columns: Vec<(String, Vec<f64>)>,
        intercept: bool,
    ) -> Result<Self> {
        let start = QuarterIndex::new(2000, 1).expect("valid quarter");
        let y = QuarterlySeries::from_values("y", crate::timeseries::Unit::Ratio, start, response);
        let series: Vec<QuarterlySeries> = columns
            .into_iter()
            .map(|(name, v)| {
                QuarterlySeries::from_values(name, crate::timeseries::Unit::Ratio, start, v)
            })
            .collect();
        let refs: Vec<&QuarterlySeries> = series.iter().collect();
        Self::from_series(&y, &refs, intercept)
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn regressors(&self) -> &DMatrix<f64> {
        &self.regressors
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[QuarterIndex] {
        &self.rows
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn n_obs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_params(&self) -> usize {
        self.names.len()
    }
}
