//! Ordinary least squares with classical inference statistics.
//!
//! Columns are scaled to unit Euclidean norm before an SVD of the design, so
//! regressors in euros and in fractions share one numerical scale. A scaled
//! singular value below `RANK_TOLERANCE` times the largest one is treated as
//! rank deficiency.

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::{DesignMatrix, INTERCEPT};
use crate::error::{Error, Result};
use crate::timeseries::{Frame, QuarterIndex, QuarterlySeries, Unit};

pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FitResult {
    response_name: String,
    names: Vec<String>,
    coefficients: Vec<f64>,
    stderrs: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_stderr: f64,
    /// `None` when undefined (intercept-only model or a perfect fit).
    pub f_statistic: Option<f64>,
    pub n_obs: usize,
    pub df_residual: usize,
    has_intercept: bool,
    rows: Vec<QuarterIndex>,
    fitted: QuarterlySeries,
    residuals: QuarterlySeries,
}

/// Estimate and standard error of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Serializable regression table: coefficients plus fit statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub coefficients: IndexMap<String, CoefficientEstimate>,
    pub r2: f64,
    pub adj_r2: f64,
    pub resid_se: f64,
    pub f_stat: Option<f64>,
    pub n: usize,
}

impl FitResult {
    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn stderrs(&self) -> &[f64] {
        &self.stderrs
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.coefficients[i])
    }

    pub fn stderr(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.stderrs[i])
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn intercept(&self) -> f64 {
        self.coefficient(INTERCEPT).unwrap_or(0.0)
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    /// Quarters used in the fit.
    pub fn rows(&self) -> &[QuarterIndex] {
        &self.rows
    }

    pub fn fitted(&self) -> &QuarterlySeries {
        &self.fitted
    }

    pub fn residuals(&self) -> &QuarterlySeries {
        &self.residuals
    }

    /// Regressor names excluding the intercept.
    pub fn regressor_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str).filter(|n| *n != INTERCEPT)
    }

    pub fn summary(&self) -> FitSummary {
        FitSummary {
            coefficients: self
                .names
                .iter()
                .zip(self.coefficients.iter().zip(&self.stderrs))
                .map(|(n, (&estimate, &stderr))| (n.clone(), CoefficientEstimate { estimate, stderr }))
                .collect(),
            r2: self.r_squared,
            adj_r2: self.adj_r_squared,
            resid_se: self.residual_stderr,
            f_stat: self.f_statistic,
            n: self.n_obs,
        }
    }
}

fn row_series(name: String, rows: &[QuarterIndex], values: &[f64]) -> QuarterlySeries {
    let Some(&start) = rows.first() else {
        return QuarterlySeries::new(name, Unit::Ratio, QuarterIndex::new(2000, 1).expect("valid"), vec![]);
    };
    let len = start.quarters_until(*rows.last().expect("non-empty")) as usize + 1;
    let mut out = vec![None; len];
    for (q, v) in rows.iter().zip(values) {
        out[start.quarters_until(*q) as usize] = Some(*v);
    }
    let unit = Unit::for_column(&name);
    QuarterlySeries::new(name, unit, start, out)
}

/// Least-squares fit of the design.
pub fn ols_fit(d: &DesignMatrix) -> Result<FitResult> {
    let x = d.regressors();
    let y = d.response();
    let (n, p) = x.shape();
    if n <= p {
        return Err(Error::InsufficientData(format!("{n} observations for {p} parameters")));
    }

    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    let zero: Vec<String> = norms
        .iter()
        .zip(d.names())
        .filter(|(nrm, _)| !(**nrm > 0.0) || !nrm.is_finite())
        .map(|(_, name)| name.clone())
        .collect();
    if !zero.is_empty() {
        return Err(Error::SingularDesign(zero));
    }
    let scale = DVector::from_iterator(p, norms.iter().map(|v| 1.0 / v));
    let scaled = DMatrix::from_fn(n, p, |i, j| x[(i, j)] * scale[j]);

    let svd = scaled.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sv = &svd.singular_values;
    let largest = sv.max();
    let deficient: Vec<usize> = (0..sv.len()).filter(|&k| !(sv[k] > RANK_TOLERANCE * largest)).collect();
    if !deficient.is_empty() {
        return Err(Error::SingularDesign(collinear_columns(v_t, &deficient, d.names())));
    }

    // beta_scaled = V diag(1/s) U^T y
    let uty = u.transpose() * y;
    let inv_s = sv.map(|s| 1.0 / s);
    let beta_scaled = v_t.transpose() * uty.component_mul(&inv_s);
    let beta = beta_scaled.component_mul(&scale);

    let fitted_v = x * &beta;
    let resid_v = y - &fitted_v;
    let rss = resid_v.norm_squared();
    let df = n - p;
    let sigma2 = rss / df as f64;

    // (X^T X)^{-1} = D V diag(1/s^2) V^T D; only the diagonal is needed.
    let stderrs: Vec<f64> = (0..p)
        .map(|j| {
            let var: f64 = (0..p).map(|k| (v_t[(k, j)] * inv_s[k]).powi(2)).sum();
            (sigma2 * var).sqrt() * scale[j]
        })
        .collect();

    let intercept = d.has_intercept();
    let tss = if intercept {
        let mean = y.mean();
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.norm_squared()
    };
    let (r_squared, adj_r_squared, f_statistic) = if tss > 0.0 {
        let r2 = 1.0 - rss / tss;
        let base = if intercept { n - 1 } else { n };
        let adj = 1.0 - (1.0 - r2) * base as f64 / df as f64;
        let df_model = p - intercept as usize;
        let f = (df_model > 0)
            .then(|| ((tss - rss) / df_model as f64) / sigma2)
            .filter(|f| f.is_finite());
        (r2, adj, f)
    } else {
        log::warn!(
            "response `{}` is constant over the sample; R² reported as 0",
            d.response_name()
        );
        (0.0, 0.0, None)
    };

    let rows = d.rows().to_vec();
    let fitted_vals: Vec<f64> = fitted_v.iter().copied().collect();
    let resid_vals: Vec<f64> = resid_v.iter().copied().collect();
    Ok(FitResult {
        response_name: d.response_name().to_string(),
        names: d.names().to_vec(),
        coefficients: beta.iter().copied().collect(),
        stderrs,
        r_squared,
        adj_r_squared,
        residual_stderr: sigma2.sqrt(),
        f_statistic,
        n_obs: n,
        df_residual: df,
        has_intercept: intercept,
        fitted: row_series(format!("{}_fitted", d.response_name()), &rows, &fitted_vals),
        residuals: row_series(format!("{}_residual", d.response_name()), &rows, &resid_vals),
        rows,
    })
}

/// Columns loading on the null-space directions of the scaled design.
fn collinear_columns(v_t: &DMatrix<f64>, deficient: &[usize], names: &[String]) -> Vec<String> {
    let mut involved = vec![false; names.len()];
    for &k in deficient {
        let row = v_t.row(k);
        let peak = row.amax();
        for (j, v) in row.iter().enumerate() {
            if v.abs() >= 0.1 * peak {
                involved[j] = true;
            }
        }
    }
    names
        .iter()
        .zip(involved)
        .filter(|(_, hit)| *hit)
        .map(|(n, _)| n.clone())
        .collect()
}

/// Evaluates the fitted linear combination on every quarter of `frame`;
/// missing where any regressor is missing.
pub fn predict(fit: &FitResult, frame: &Frame) -> Result<QuarterlySeries> {
    let columns = fit
        .names
        .iter()
        .zip(&fit.coefficients)
        .filter(|(n, _)| n.as_str() != INTERCEPT)
        .map(|(n, &b)| frame.column(n).map(|c| (c, b)))
        .collect::<Result<Vec<_>>>()?;
    let intercept = fit.intercept();
    let values = (0..frame.len())
        .map(|t| {
            columns
                .iter()
                .try_fold(intercept, |acc, (c, b)| c.values()[t].map(|v| acc + b * v))
        })
        .collect();
    let name = format!("{}_predicted", fit.response_name);
    Ok(QuarterlySeries::new(name, Unit::for_column(&fit.response_name), frame.start(), values))
}
