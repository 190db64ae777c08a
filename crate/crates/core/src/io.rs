//! CSV series ingestion, edge-list output and timing tables.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Edge, VisibilityGraph};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ValueColumn {
    /// Second column, or the only column of a single-column file.
    #[default]
    Default,
    Name(String),
    Position(usize),
}

impl FromStr for ValueColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.parse::<usize>() {
            Ok(p) => ValueColumn::Position(p),
            Err(_) => ValueColumn::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowOrder {
    #[default]
    OldestFirst,
    NewestFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesFile {
    pub path: PathBuf,
    pub value_column: ValueColumn,
    pub has_header: bool,
    pub order: RowOrder,
}

impl SeriesFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            value_column: ValueColumn::Default,
            has_header: true,
            order: RowOrder::OldestFirst,
        }
    }
}

/// Reads the value column of `file` as an oldest-first series.
pub fn read_series_csv(file: &SeriesFile) -> Result<Vec<f64>> {
    let f = File::open(&file.path)?;
    read_series(f, &file.value_column, file.has_header, file.order)
}

pub fn read_series<R: Read>(
    reader: R,
    column: &ValueColumn,
    has_header: bool,
    order: RowOrder,
) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let named = match column {
        ValueColumn::Name(name) => {
            if !has_header {
                return Err(Error::MissingColumn(format!("{name:?} (file has no header)")));
            }
            let pos = rdr
                .headers()?
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(format!("{name:?}")))?;
            Some(pos)
        }
        _ => None,
    };

    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let pos = match column {
            ValueColumn::Name(_) => named.expect("resolved above"),
            ValueColumn::Position(p) => *p,
            ValueColumn::Default if record.len() == 1 => 0,
            ValueColumn::Default => 1,
        };
        let cell = record
            .get(pos)
            .ok_or_else(|| Error::MissingColumn(format!("{pos} on line {line}")))?;
        values.push(parse_value(cell).map_err(|message| Error::Parse { line, message })?);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if order == RowOrder::NewestFirst {
        values.reverse();
    }
    Ok(values)
}

/// Parses one numeric cell. Quotes and surrounding whitespace are already
/// gone; thousands separators are stripped here.
pub fn parse_value(cell: &str) -> std::result::Result<f64, String> {
    let cleaned: String = cell.trim().chars().filter(|&c| c != ',').collect();
    let v: f64 = cleaned
        .parse()
        .map_err(|_| format!("not a number: {cell:?}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite value: {cell:?}"));
    }
    Ok(v)
}

/// Reads one value per line, skipping blank lines.
pub fn read_values_lines<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        let line = k as u64 + 1;
        values.push(parse_value(cell).map_err(|message| Error::Parse { line, message })?);
    }
    Ok(values)
}

/// Writes `g` as sorted `"i j"` lines.
pub fn write_edge_list<W: Write>(g: &VisibilityGraph, sink: W) -> Result<()> {
    write_edges(&g.edges_sorted(), sink)
}

pub fn write_edges<W: Write>(edges: &[Edge], mut sink: W) -> Result<()> {
    for (i, j) in edges {
        writeln!(sink, "{i} {j}")?;
    }
    sink.flush()?;
    Ok(())
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            line: k as u64 + 1,
            message: format!("expected \"i j\", got {line:?}"),
        };
        let mut parts = line.split_whitespace();
        let i = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let j = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        edges.push((i, j));
    }
    Ok(edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Measure {
    /// Average seconds per iteration.
    #[default]
    Mean,
    /// Seconds summed over all iterations.
    Total,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Mean => "mean",
            Measure::Total => "total",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Measure::Mean),
            "total" => Ok(Measure::Total),
            other => Err(Error::InvalidChoice(format!("unknown measure {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub algorithm: String,
    pub series: String,
    pub window: usize,
    /// 1-based.
    pub repeat: usize,
    pub measure: Measure,
    pub seconds: f64,
}

pub const TIMINGS_HEADER: &str = "algorithm,series,window,repeat,measure,seconds";

pub fn write_timings_csv<W: Write>(records: &[TimingRecord], mut sink: W) -> Result<()> {
    writeln!(sink, "{TIMINGS_HEADER}")?;
    for r in records {
        writeln!(
            sink,
            "{},{},{},{},{},{}",
            r.algorithm,
            r.series,
            r.window,
            r.repeat,
            r.measure,
            format_seconds(r.seconds)
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Scientific notation with three significant digits and a signed,
/// two-digit exponent: `1.02E-03`, `0.00E+00`.
pub fn format_seconds(seconds: f64) -> String {
    // Rust renders `1.02E-3`; re-pad the exponent.
    let raw = format!("{seconds:.2E}");
    let (mantissa, exp) = raw.split_once('E').expect("E format always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}
