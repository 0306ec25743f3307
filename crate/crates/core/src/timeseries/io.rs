//! CSV reading and writing for series and frames.
//!
//! Series files have the header `quarter,value`; frame files have
//! `quarter,<col1>,<col2>,...`. Empty fields are missing values. Numbers
//! always use `.` as the decimal separator and are written in the shortest
//! form that parses back to the same `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use super::frame::{align, Frame};
use super::quarter::{parse_quarter, QuarterIndex};
use super::series::{QuarterlySeries, Unit};
use crate::error::{Error, Result};

fn parse_error(source: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_cell(source: &str, line: u64, field: &str) -> Result<Option<f64>> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(parse_error(source, line, format!("invalid number `{field}`"))),
    }
}

struct Table {
    header: Vec<String>,
    rows: BTreeMap<QuarterIndex, Vec<Option<f64>>>,
}

fn read_table(reader: impl Read, source: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_error(source, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("quarter") || header.len() < 2 {
        return Err(parse_error(
            source,
            1,
            format!("expected header `quarter,...`, got `{}`", header.join(",")),
        ));
    }
    let mut rows = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_error(
                source,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let quarter =
            parse_quarter(&record[0]).map_err(|e| parse_error(source, line, e.to_string()))?;
        let values = record
            .iter()
            .skip(1)
            .map(|f| parse_cell(source, line, f))
            .collect::<Result<Vec<_>>>()?;
        if rows.insert(quarter, values).is_some() {
            return Err(parse_error(source, line, format!("duplicate quarter {quarter}")));
        }
    }
    if rows.is_empty() {
        return Err(parse_error(source, 1, "no data rows"));
    }
    Ok(Table { header, rows })
}

impl Table {
    fn column(&self, idx: usize, name: &str, unit: Unit) -> QuarterlySeries {
        let start = *self.rows.keys().next().expect("non-empty");
        let end = *self.rows.keys().next_back().expect("non-empty");
        let values = (0..=start.quarters_until(end))
            .map(|i| self.rows.get(&start.offset(i)).and_then(|r| r[idx]))
            .collect();
        QuarterlySeries::new(name, unit, start, values)
    }
}

/// Parses a single-series CSV. Quarters missing from the file become missing
/// values so the result is contiguous.
pub fn parse_series_csv(
    reader: impl Read,
    source: &str,
    name: &str,
    unit: Unit,
) -> Result<QuarterlySeries> {
    let table = read_table(reader, source)?;
    if table.header.len() != 2 {
        return Err(parse_error(
            source,
            1,
            format!("expected header `quarter,value`, got `{}`", table.header.join(",")),
        ));
    }
    Ok(table.column(0, name, unit))
}

pub fn read_series_csv(path: &Path, name: &str, unit: Unit) -> Result<QuarterlySeries> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_series_csv(file, &path.display().to_string(), name, unit)
}

/// Parses a yearly CSV with header `year,value` into a year → value map,
/// the input of [`interpolate_yearly_to_quarterly`](super::interpolate_yearly_to_quarterly).
/// Empty values are skipped.
pub fn parse_yearly_csv(reader: impl Read, source: &str) -> Result<BTreeMap<i32, f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_error(source, 1, e.to_string()))?;
    if header.len() != 2 || &header[0] != "year" {
        return Err(parse_error(
            source,
            1,
            format!("expected header `year,value`, got `{}`", header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let year: i32 = record[0]
            .parse()
            .map_err(|_| parse_error(source, line, format!("invalid year `{}`", &record[0])))?;
        let Some(v) = parse_cell(source, line, &record[1])? else { continue };
        if out.insert(year, v).is_some() {
            return Err(parse_error(source, line, format!("duplicate year {year}")));
        }
    }
    Ok(out)
}

pub fn read_yearly_csv(path: &Path) -> Result<BTreeMap<i32, f64>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_yearly_csv(file, &path.display().to_string())
}

fn push_value(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        write!(out, "{v}").expect("write to string");
    }
}

pub fn series_to_csv(s: &QuarterlySeries) -> String {
    let mut out = String::from("quarter,value\n");
    for (q, v) in s.iter() {
        write!(out, "{q},").expect("write to string");
        push_value(&mut out, v);
        out.push('\n');
    }
    out
}

pub fn write_series_csv(s: &QuarterlySeries, path: &Path) -> Result<()> {
    fs::write(path, series_to_csv(s)).map_err(|e| Error::io(path, e))
}

/// Parses a frame CSV. Column units are inferred from their names.
pub fn parse_frame_csv(reader: impl Read, source: &str) -> Result<Frame> {
    let table = read_table(reader, source)?;
    let columns = table
        .header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, name)| table.column(i - 1, name, Unit::for_column(name)));
    align(columns).map_err(|e| match e {
        Error::DuplicateColumn(c) => parse_error(source, 1, format!("duplicate column `{c}`")),
        other => other,
    })
}

pub fn read_frame_csv(path: &Path) -> Result<Frame> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_frame_csv(file, &path.display().to_string())
}

pub fn frame_to_csv(frame: &Frame) -> String {
    let mut out = String::from("quarter");
    for name in frame.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (t, q) in frame.quarters().enumerate() {
        write!(out, "{q}").expect("write to string");
        for c in frame.columns() {
            out.push(',');
            push_value(&mut out, c.values()[t]);
        }
        out.push('\n');
    }
    out
}

pub fn write_frame_csv(frame: &Frame, path: &Path) -> Result<()> {
    fs::write(path, frame_to_csv(frame)).map_err(|e| Error::io(path, e))
}
