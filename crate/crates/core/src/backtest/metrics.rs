use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{QuarterIndex, QuarterlySeries};

/// Forecast accuracy in the response's units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    #[serde(rename = "n")]
    pub n_evaluated: usize,
}

/// Quarters that count towards [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    All,
    /// Up to and including the quarter.
    Until(QuarterIndex),
    /// Strictly after the quarter.
    After(QuarterIndex),
}

impl Window {
    pub fn contains(self, q: QuarterIndex) -> bool {
        match self {
            Window::All => true,
            Window::Until(end) => q <= end,
            Window::After(end) => q > end,
        }
    }
}

impl Metrics {
    /// Metrics of a set of errors; `None` when empty.
    pub fn from_errors(errors: impl IntoIterator<Item = f64>) -> Option<Metrics> {
        let (mut n, mut sq, mut abs) = (0usize, 0.0, 0.0);
        for e in errors {
            n += 1;
            sq += e * e;
            abs += e.abs();
        }
        (n > 0).then(|| Metrics {
            rmse: (sq / n as f64).sqrt(),
            mae: abs / n as f64,
            n_evaluated: n,
        })
    }
}

/// RMSE and MAE of `predicted - observed` over quarters in `window` where
/// both are present.
pub fn evaluate(observed: &QuarterlySeries, predicted: &QuarterlySeries, window: Window) -> Result<Metrics> {
    let errors = predicted
        .observations()
        .filter(|(q, _)| window.contains(*q))
        .filter_map(|(q, p)| observed.get(q).map(|o| p - o));
    Metrics::from_errors(errors).ok_or_else(|| {
        Error::InsufficientData(format!(
            "no overlapping observations of `{}` and `{}` to evaluate",
            observed.name(),
            predicted.name()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::Unit;

    fn series(name: &str, v: &[f64]) -> QuarterlySeries {
        QuarterlySeries::from_values(name, Unit::Euros, QuarterIndex::new(2000, 1).unwrap(), v.iter().copied())
    }

    #[test]
    fn identical_series_score_zero() {
        let s = series("HP", &[1.0, 2.0, 3.0]);
        let m = evaluate(&s, &s, Window::All).unwrap();
        assert_eq!((m.rmse, m.mae, m.n_evaluated), (0.0, 0.0, 3));
    }

    #[test]
    fn hand_computed_residuals() {
        let m = evaluate(&series("o", &[10.0, 10.0]), &series("p", &[13.0, 6.0]), Window::All).unwrap();
        assert_eq!(m.mae, 3.5);
        assert_eq!(m.rmse, 12.5f64.sqrt());
        let one = evaluate(&series("o", &[1.0]), &series("p", &[-1.5]), Window::All).unwrap();
        assert_eq!((one.rmse, one.mae), (2.5, 2.5));
    }

    #[test]
    fn windows_split_the_sample() {
        let o = series("o", &[0.0; 4]);
        let p = series("p", &[1.0, 1.0, 2.0, 2.0]);
        let cut = QuarterIndex::new(2000, 2).unwrap();
        assert_eq!(evaluate(&o, &p, Window::Until(cut)).unwrap().mae, 1.0);
        assert_eq!(evaluate(&o, &p, Window::After(cut)).unwrap().mae, 2.0);
        assert!(matches!(
            evaluate(&o, &p, Window::After(QuarterIndex::new(2001, 1).unwrap())),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn missing_values_are_skipped() {
        let o = QuarterlySeries::new("o", Unit::Euros, QuarterIndex::new(2000, 1).unwrap(), vec![Some(0.0), None, Some(0.0)]);
        let p = series("p", &[1.0, 5.0, 1.0]);
        let m = evaluate(&o, &p, Window::All).unwrap();
        assert_eq!((m.mae, m.n_evaluated), (1.0, 2));
    }

    #[test]
    fn scales_with_units() {
        let o = series("o", &[1.0, 4.0, -2.0]);
        let p = series("p", &[0.5, 7.0, 1.0]);
        let base = evaluate(&o, &p, Window::All).unwrap();
        // A power of two keeps every intermediate exact.
        let scaled = evaluate(&o.map(|v| v * 1024.0), &p.map(|v| v * 1024.0), Window::All).unwrap();
        assert_eq!(scaled.rmse, 1024.0 * base.rmse);
        assert_eq!(scaled.mae, 1024.0 * base.mae);
    }
}
