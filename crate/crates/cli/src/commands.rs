use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hlc_core::backtest::{build_features, emit_plot_data, render_tables, run_grid, BacktestReport};
use hlc_core::regress::lag_scan;
use hlc_core::synthetic::generate;
use hlc_core::timeseries::io::{read_frame_csv, read_series_csv, read_yearly_csv, write_frame_csv, write_series_csv};
use hlc_core::timeseries::{align, interpolate_yearly_to_quarterly, Frame, SummaryStats};

use crate::config::{ConfigError, DataSource, Frequency, InputUnit, RunConfig};

/// Every variant of a backtest failed.
#[derive(Debug)]
pub struct AllVariantsFailed;

impl fmt::Display for AllVariantsFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("every model variant failed; see the report for details")
    }
}

impl std::error::Error for AllVariantsFailed {}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn unit_of(column: &str) -> InputUnit {
    match column {
        "HP" | "I" => InputUnit::Euros,
        "r" | "LTV" => InputUnit::Fraction,
        _ => InputUnit::Share,
    }
}

pub fn synth(cfg: &RunConfig, run_dir: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let scenario = generate(&cfg.synth)?;
    let data_dir = run_dir.join("data");
    create_dir(&data_dir)?;

    let mut ingest_cfg = cfg.clone();
    ingest_cfg.output_dir = None;
    ingest_cfg.data.clear();
    for column in scenario.frame.columns() {
        let file = format!("{}.csv", column.name());
        write_series_csv(column, &data_dir.join(&file))?;
        ingest_cfg.data.insert(
            column.name().to_string(),
            DataSource {
                path: PathBuf::from("data").join(file),
                unit: unit_of(column.name()),
                frequency: Frequency::Quarterly,
                anchor_quarter: 4,
            },
        );
    }
    write_frame_csv(&scenario.frame, &run_dir.join("frame.csv"))?;
    let truth = serde_json::to_string_pretty(&scenario.truth)? + "\n";
    write_file(&run_dir.join("truth.json"), &truth)?;
    write_file(&run_dir.join("config.toml"), &ingest_cfg.to_toml())?;
    writeln!(
        out,
        "generated {} quarters from {} (seed {}, noise {})",
        scenario.frame.len(),
        scenario.frame.start(),
        cfg.synth.seed,
        cfg.synth.noise_scale
    )?;
    writeln!(
        out,
        "true relation: HP = {:.3} + {:.6} * HLC_lag{}",
        scenario.truth.intercept, scenario.truth.hlc_coefficient, scenario.truth.hlc_lag
    )?;
    Ok(())
}

fn load_source(name: &str, source: &DataSource) -> anyhow::Result<hlc_core::QuarterlySeries> {
    let (scale, unit) = source.unit.normalization();
    let series = match source.frequency {
        Frequency::Quarterly => read_series_csv(&source.path, name, unit)?,
        Frequency::Yearly => {
            let yearly = read_yearly_csv(&source.path)?;
            interpolate_yearly_to_quarterly(name, unit, &yearly, source.anchor_quarter)
                .with_context(|| format!("interpolating {}", source.path.display()))?
        }
    };
    Ok(if scale == 1.0 { series } else { series.map(|v| v * scale) })
}

/// Table of summary statistics, one row per column.
pub fn summary_table(frame: &Frame) -> String {
    let mut s = format!(
        "{:<16} {:>5} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}\n",
        "series", "N", "mean", "sd", "min", "p25", "p75", "max"
    );
    for c in frame.columns() {
        match SummaryStats::of(c) {
            Some(st) => s.push_str(&format!(
                "{:<16} {:>5} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {:>14.4} {:>14.4}\n",
                c.name(),
                st.n,
                st.mean,
                st.sd,
                st.min,
                st.p25,
                st.p75,
                st.max
            )),
            None => s.push_str(&format!("{:<16} {:>5}\n", c.name(), 0)),
        }
    }
    s
}

fn summary_csv(frame: &Frame) -> String {
    let mut s = String::from("series,n,mean,sd,min,p25,p75,max\n");
    for c in frame.columns() {
        if let Some(st) = SummaryStats::of(c) {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.name(),
                st.n,
                st.mean,
                st.sd,
                st.min,
                st.p25,
                st.p75,
                st.max
            ));
        }
    }
    s
}

/// Reads and aligns every `[data]` series.
pub fn load_frame(cfg: &RunConfig) -> anyhow::Result<Frame> {
    if cfg.data.is_empty() {
        return Err(ConfigError("no [data] series to ingest".into()).into());
    }
    let columns = cfg
        .data
        .iter()
        .map(|(name, source)| load_source(name, source))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(align(columns)?)
}

pub fn ingest(cfg: &RunConfig, run_dir: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let frame = load_frame(cfg)?;
    create_dir(run_dir)?;
    write_frame_csv(&frame, &run_dir.join("frame.csv"))?;
    write_file(&run_dir.join("summary_stats.csv"), &summary_csv(&frame))?;
    writeln!(
        out,
        "frame: {} columns x {} rows ({} to {})",
        frame.columns().len(),
        frame.len(),
        frame.start(),
        frame.end().expect("non-empty frame")
    )?;
    write!(out, "{}", summary_table(&frame))?;
    Ok(())
}

pub fn features(cfg: &RunConfig, frame: &Path, run_dir: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let raw = read_frame_csv(frame)?;
    let features = build_features(&raw, &cfg.lti, &cfg.features)?;
    create_dir(run_dir)?;
    write_frame_csv(&features, &run_dir.join("features.csv"))?;
    writeln!(out, "features: {}", features.names().collect::<Vec<_>>().join(", "))?;
    match features.complete_range() {
        Some((a, b)) => writeln!(out, "complete rows: {a} to {b}")?,
        None => writeln!(out, "complete rows: none")?,
    }
    Ok(())
}

pub fn lagscan(cfg: &RunConfig, features: &Path, run_dir: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let frame = read_frame_csv(features)?;
    let lc = &cfg.lagscan;
    let scan = lag_scan(frame.column(&lc.response)?, frame.column(&lc.candidate)?, lc.min_lag..=lc.max_lag)?;
    let mut csv = String::from("lag,r_squared,n_obs\n");
    writeln!(out, "{:>4} {:>10} {:>6}", "lag", "R2", "n")?;
    for s in &scan.scores {
        let r2 = s.r_squared.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{r2},{}\n", s.lag, s.n_obs));
        let shown = s.r_squared.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
        writeln!(out, "{:>4} {shown:>10} {:>6}", s.lag, s.n_obs)?;
    }
    create_dir(run_dir)?;
    write_file(&run_dir.join("lagscan.csv"), &csv)?;
    match scan.best() {
        Some(b) => writeln!(
            out,
            "best lag of {} for {}: {} (R2 = {:.4})",
            lc.candidate,
            lc.response,
            b.lag,
            b.r_squared.expect("scored lag")
        )?,
        None => writeln!(out, "no usable lag")?,
    }
    Ok(())
}

pub fn backtest(cfg: &RunConfig, features: &Path, run_dir: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let frame = read_frame_csv(features)?;
    let specs = cfg.grid.resolve()?;
    let report = run_grid(&frame, &specs, &cfg.split)?;
    create_dir(run_dir)?;
    write_file(&run_dir.join("report.json"), &report.to_json())?;
    emit_plot_data(&report, run_dir)?;
    write!(out, "{}", render_tables(&report))?;
    let failed: Vec<_> = report.variants.iter().filter(|v| v.error.is_some()).collect();
    for v in &failed {
        writeln!(
            out,
            "warning: {} ({}) failed: {}",
            v.name,
            v.regime.label(),
            v.error.as_deref().unwrap_or_default()
        )?;
    }
    if failed.len() == report.variants.len() {
        return Err(AllVariantsFailed.into());
    }
    Ok(())
}

pub fn report(report: &Path, run_dir: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let text = fs::read_to_string(report).with_context(|| format!("reading {}", report.display()))?;
    let report = BacktestReport::from_json(&text).with_context(|| format!("parsing {}", report.display()))?;
    let tables = render_tables(&report);
    create_dir(run_dir)?;
    write_file(&run_dir.join("tables.txt"), &tables)?;
    write!(out, "{tables}")?;
    Ok(())
}
