use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::grid::{BacktestReport, VariantReport};
use super::metrics::Metrics;
use super::spec::{Approach, Regime};
use crate::error::{Error, Result};
use crate::timeseries::QuarterIndex;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn plot_csv(v: &VariantReport) -> Option<String> {
    let observed = v.observed.as_ref()?;
    let predicted = v.predicted.as_ref()?;
    let start = observed.start().min(predicted.start());
    let end = match (observed.end(), predicted.end()) {
        (Some(a), Some(b)) => a.max(b),
        (a, b) => a.or(b)?,
    };
    let mut out = String::from("quarter,observed,fitted_or_forecast,regime\n");
    let mut q = start;
    while q <= end {
        let _ = writeln!(out, "{q},{},{},{}", opt(observed.get(q)), opt(predicted.get(q)), v.regime.label());
        q = q.succ();
    }
    Some(out)
}

fn metric_cells(m: Option<Metrics>) -> [String; 3] {
    match m {
        Some(m) => [m.n_evaluated.to_string(), m.rmse.to_string(), m.mae.to_string()],
        None => Default::default(),
    }
}

/// One row per variant with metrics in euros under both windows.
pub fn summary_csv(report: &BacktestReport) -> String {
    let mut out = String::from(
        "family,name,approach,regime,train_end,n_all,rmse_eur,mae_eur,n_holdout,holdout_rmse_eur,holdout_mae_eur,error\n",
    );
    for v in &report.variants {
        let [n, rmse, mae] = metric_cells(v.metrics_all);
        let [hn, hrmse, hmae] = metric_cells(v.metrics_holdout);
        let error = v
            .error
            .as_deref()
            .map(|e| format!("\"{}\"", e.replace('"', "\"\"")))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{n},{rmse},{mae},{hn},{hrmse},{hmae},{error}",
            v.family,
            v.name,
            v.approach.label(),
            v.regime.label(),
            v.train_end.map(|q| q.to_string()).unwrap_or_default(),
        );
    }
    out
}

/// Writes `summary.csv` and, for every variant that carries its series,
/// `plots/<name>_<regime>.csv` under `dir`. Returns the files written.
pub fn emit_plot_data(report: &BacktestReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let plots = dir.join("plots");
    fs::create_dir_all(&plots).map_err(|e| Error::io(&plots, e))?;
    let mut written = Vec::new();
    let summary = dir.join("summary.csv");
    fs::write(&summary, summary_csv(report)).map_err(|e| Error::io(&summary, e))?;
    written.push(summary);
    for v in &report.variants {
        let Some(csv) = plot_csv(v) else { continue };
        let path = plots.join(format!("{}_{}.csv", v.name, v.regime.label()));
        fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn family_title(family: &str) -> String {
    match family {
        "benchmark" => "Benchmark".into(),
        "hlc" => "HLC".into(),
        "benchmark_hlc" => "Benchmark + HLC".into(),
        "benchmark_debt" => "Benchmark + mortgage debt/GDP".into(),
        other => other.into(),
    }
}

fn regime_caption(regime: Regime, cutoff: QuarterIndex) -> String {
    match regime {
        Regime::Full => "fit on all quarters".into(),
        Regime::Truncated => format!("fit on quarters up to {cutoff}"),
    }
}

fn thousands(v: f64) -> String {
    format!("{:.3}", v / 1000.0)
}

/// Plain-text tables, one per family, with RMSE and MAE in thousands of
/// euros under the report's headline window. Rows run OLS full, OLS
/// truncated, ECM full, ECM truncated.
pub fn render_tables(report: &BacktestReport) -> String {
    let window = report.evaluation_window;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Metrics in thousands of euros, evaluated over {}.",
        match window {
            super::spec::EvaluationWindow::AllQuarters => "all quarters".to_string(),
            super::spec::EvaluationWindow::HoldoutOnly => format!("quarters after {}", report.cutoff),
        }
    );
    for family in &report.families {
        let _ = writeln!(out, "\n{}", family_title(family));
        let _ = writeln!(out, "{:<44} {:>10} {:>10}", "Model type", "RMSE", "MAE");
        for approach in [Approach::Ols, Approach::Ecm] {
            for regime in [Regime::Full, Regime::Truncated] {
                let rows = report
                    .variants
                    .iter()
                    .filter(|v| &v.family == family && v.approach == approach && v.regime == regime);
                for v in rows {
                    let label = format!("{} {}", approach.label(), regime_caption(regime, report.cutoff));
                    let (rmse, mae) = match (v.metrics(window), &v.error) {
                        (Some(m), _) => (thousands(m.rmse), thousands(m.mae)),
                        (None, Some(_)) => ("failed".into(), "failed".into()),
                        (None, None) => ("n/a".into(), "n/a".into()),
                    };
                    let _ = writeln!(out, "{label:<44} {rmse:>10} {mae:>10}");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtest::{run_grid, ModelSpec, SplitSpec};
    use crate::timeseries::{align, QuarterlySeries, Unit};

    fn report() -> BacktestReport {
        let q0 = QuarterIndex::new(2000, 1).unwrap();
        let x: Vec<f64> = (0..40).map(|t| 10.0 + (t as f64 * 0.3).sin() + 0.1 * t as f64).collect();
        let hp: Vec<f64> = x.iter().enumerate().map(|(t, v)| 100_000.0 + 5_000.0 * v + 10.0 * (t % 3) as f64).collect();
        let frame = align([
            QuarterlySeries::from_values("HP", Unit::Euros, q0, hp),
            QuarterlySeries::from_values("HLC", Unit::Euros, q0, x),
        ])
        .unwrap();
        let split = SplitSpec {
            cutoff: QuarterIndex::new(2006, 4).unwrap(),
            ..SplitSpec::default()
        };
        let specs = [ModelSpec::hlc(Approach::Ols), ModelSpec::hlc(Approach::Ecm)];
        run_grid(&frame, &specs, &split).unwrap()
    }

    #[test]
    fn tables_follow_row_order() {
        let text = render_tables(&report());
        let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("OLS") || l.starts_with("ECM")).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].starts_with("OLS fit on all quarters"));
        assert!(rows[1].starts_with("OLS fit on quarters up to 2006Q4"));
        assert!(rows[2].starts_with("ECM fit on all quarters"));
        assert!(rows[3].starts_with("ECM fit on quarters up to 2006Q4"));
        assert!(text.contains("\nHLC\n"));
    }

    #[test]
    fn writes_summary_and_plots() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plot_data(&report(), dir.path()).unwrap();
        assert_eq!(files.len(), 5);
        let plot = fs::read_to_string(dir.path().join("plots/hlc_ols_truncated.csv")).unwrap();
        let mut lines = plot.lines();
        assert_eq!(lines.next(), Some("quarter,observed,fitted_or_forecast,regime"));
        assert!(lines.next().unwrap().starts_with("2000Q1,"));
        assert!(plot.lines().all(|l| l.ends_with(",regime") || l.ends_with(",truncated")));
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 5);
        assert!(summary.lines().next().unwrap().contains("rmse_eur"));
    }
}
