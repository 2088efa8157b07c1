//! Delimited-file ingestion and windowed trend series.
//!
//! A [`CategoricalDataset`] is a plain table of verbatim text labels: no type
//! inference, no canonicalization, case-sensitive. Values are kept exactly as
//! read; an empty field is the (valid) category `""`. Trend series slice the
//! rows into time windows, count each window into a distribution, and
//! evaluate one measure per window.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::distribution::{JointDistribution, VariableSet};
use crate::error::{Error, Result};
use crate::measures::{self, MeasureKind, MeasureOptions, MeasureReport};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Table of records with named categorical columns and an optional time
/// column.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalDataset {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    time_column: Option<String>,
    declared_alphabets: BTreeMap<String, Vec<String>>,
}

impl CategoricalDataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(Error::DuplicateVariable(c.clone()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::RaggedRow {
                    line: i as u64 + 1,
                    expected: columns.len() as u64,
                    got: row.len() as u64,
                });
            }
        }
        Ok(CategoricalDataset {
            columns,
            rows,
            time_column: None,
            declared_alphabets: BTreeMap::new(),
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn time_column(&self) -> Option<&str> {
        self.time_column.as_deref()
    }

    pub fn set_time_column(&mut self, name: impl Into<String>) -> Result<()> {
        let name = name.into();
        if self.column_index(&name).is_none() {
            return Err(Error::UnknownVariable(name));
        }
        self.time_column = Some(name);
        Ok(())
    }

    /// Declares alphabets that take precedence over the observed values when
    /// counting records into a distribution.
    pub fn declare_alphabets(&mut self, alphabets: BTreeMap<String, Vec<String>>) {
        self.declared_alphabets = alphabets;
    }

    pub fn declared_alphabet(&self, column: &str) -> Option<&[String]> {
        self.declared_alphabets.get(column).map(Vec::as_slice)
    }

    /// Distinct values of one column in first-appearance order.
    pub fn observed_alphabet(&self, column: &str) -> Result<Vec<String>> {
        let idx = self
            .column_index(column)
            .ok_or_else(|| Error::UnknownVariable(column.to_string()))?;
        let mut seen = Vec::new();
        for row in &self.rows {
            if !seen.contains(&row[idx]) {
                seen.push(row[idx].clone());
            }
        }
        Ok(seen)
    }
}

/// Parsing configuration for [`read_delimited`].
#[derive(Clone, Debug)]
pub struct ReadOptions {
    pub delimiter: u8,
    pub has_header: bool,
    /// Schema alphabets to declare on the resulting dataset.
    pub declared_alphabets: Option<BTreeMap<String, Vec<String>>>,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            delimiter: b',',
            has_header: true,
            declared_alphabets: None,
        }
    }
}

/// Reads a delimited UTF-8 file. With a header the first row names the
/// columns; without one the columns are `c0…cK`.
pub fn read_delimited(path: impl AsRef<Path>, options: &ReadOptions) -> Result<CategoricalDataset> {
    let file = std::fs::File::open(path)?;
    read_delimited_from(file, options)
}

pub fn read_delimited_from<R: Read>(
    mut reader: R,
    options: &ReadOptions,
) -> Result<CategoricalDataset> {
    let mut raw = String::new();
    reader
        .read_to_string(&mut raw)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Malformed("input is not UTF-8".into()),
            _ => Error::Io(e),
        })?;
    if raw.is_empty() {
        return Err(Error::EmptyFile);
    }

    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(false)
        .from_reader(raw.as_bytes());

    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(map_csv_error)?;
        rows.push(record.iter().map(str::to_string).collect());
    }

    let columns: Vec<String> = if options.has_header {
        csv_reader
            .headers()
            .map_err(map_csv_error)?
            .iter()
            .map(str::to_string)
            .collect()
    } else {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        (0..width).map(|i| format!("c{i}")).collect()
    };
    if columns.is_empty() {
        return Err(Error::EmptyFile);
    }

    let mut dataset = CategoricalDataset::new(columns, rows)?;
    if let Some(alphabets) = &options.declared_alphabets {
        dataset.declare_alphabets(alphabets.clone());
    }
    Ok(dataset)
}

fn map_csv_error(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::RaggedRow {
            line: pos.as_ref().map(|p| p.line()).unwrap_or(0),
            expected: *expected_len,
            got: *len,
        },
        csv::ErrorKind::Io(_) => Error::Malformed(e.to_string()),
        _ => Error::Malformed(e.to_string()),
    }
}

/// Writes the dataset back out; round-trips byte-for-byte modulo line
/// endings for input that needed no quoting changes.
pub fn write_delimited(
    dataset: &CategoricalDataset,
    path: impl AsRef<Path>,
    delimiter: u8,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_delimited_to(dataset, file, delimiter)
}

pub fn write_delimited_to<W: Write>(
    dataset: &CategoricalDataset,
    writer: W,
    delimiter: u8,
) -> Result<()> {
    let mut csv_writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .quote_style(csv::QuoteStyle::Necessary)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    csv_writer
        .write_record(dataset.columns())
        .map_err(map_csv_error)?;
    for row in dataset.rows() {
        csv_writer.write_record(row).map_err(map_csv_error)?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Builds a distribution from rows carrying an explicit (possibly fractional)
/// count in `weight_column`.
pub fn weighted_distribution(
    dataset: &CategoricalDataset,
    vars: &VariableSet,
    weight_column: &str,
) -> Result<JointDistribution> {
    let weight_idx = dataset
        .column_index(weight_column)
        .ok_or_else(|| Error::UnknownVariable(weight_column.to_string()))?;
    if vars.iter().any(|v| v.name() == weight_column) {
        return Err(Error::OverlappingSets(weight_column.to_string()));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }

    // Expand each row `weight` times is the semantics; numerically the weight
    // is just the count, so count tuples directly.
    let mut expanded_columns: Vec<String> = Vec::new();
    let mut column_indices = Vec::new();
    for var in vars.iter() {
        let idx = dataset
            .column_index(var.name())
            .ok_or_else(|| Error::UnknownVariable(var.name().to_string()))?;
        column_indices.push(idx);
        expanded_columns.push(var.name().to_string());
    }

    let mut alphabets = Vec::with_capacity(vars.len());
    for var in vars.iter() {
        let categories = match dataset.declared_alphabet(var.name()) {
            Some(declared) => declared.to_vec(),
            None => dataset.observed_alphabet(var.name())?,
        };
        alphabets.push(crate::distribution::Alphabet::new(var.clone(), categories)?);
    }

    let mut counts: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (line, row) in dataset.rows().iter().enumerate() {
        let raw = &row[weight_idx];
        let weight: f64 = raw.parse().map_err(|_| Error::InvalidWeight {
            line: line as u64 + 1,
            value: raw.clone(),
        })?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight {
                line: line as u64 + 1,
                value: raw.clone(),
            });
        }
        let mut tuple = Vec::with_capacity(vars.len());
        for (slot, &col) in column_indices.iter().enumerate() {
            let value = &row[col];
            let idx = alphabets[slot].index_of(value).ok_or_else(|| {
                Error::CategoryOutsideAlphabet {
                    variable: expanded_columns[slot].clone(),
                    category: value.clone(),
                }
            })?;
            tuple.push(idx);
        }
        *counts.entry(tuple).or_insert(0.0) += weight;
    }
    JointDistribution::from_counts(alphabets, counts)
}

/// How time labels are ordered and grouped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TimeOrdering {
    /// Numeric when every label parses as an integer, lexical otherwise.
    #[default]
    Auto,
    /// Force integer parsing; non-integer labels are an error.
    Numeric,
    /// Force lexicographic ordering of the observed labels.
    Lexical,
}

/// Window geometry over the time axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    /// Consecutive time labels per window.
    pub width: usize,
    /// Labels to advance between windows.
    pub step: usize,
}

impl WindowSpec {
    pub fn sliding(width: usize, step: usize) -> Result<Self> {
        if width == 0 || step == 0 {
            return Err(Error::Malformed(
                "window width and step must be at least 1".into(),
            ));
        }
        Ok(WindowSpec { width, step })
    }

    /// Adjacent non-overlapping windows: step equals width.
    pub fn disjoint(width: usize) -> Result<Self> {
        Self::sliding(width, width)
    }

    pub fn is_disjoint(&self) -> bool {
        self.step == self.width
    }
}

/// The window slices plus the labels of windows that held no rows.
#[derive(Clone, Debug)]
pub struct WindowedDatasets {
    pub windows: Vec<(String, CategoricalDataset)>,
    /// Labels of empty windows, skipped rather than reported as zero: a zero
    /// point would be indistinguishable from true independence.
    pub gaps: Vec<String>,
}

/// Slices `dataset` into full-width windows over its time axis. Under
/// numeric ordering the axis is the complete integer range between the
/// smallest and largest observed label, so missing years surface as gaps;
/// under lexical ordering the axis is the observed labels.
pub fn window_datasets(
    dataset: &CategoricalDataset,
    spec: &WindowSpec,
    ordering: TimeOrdering,
) -> Result<WindowedDatasets> {
    let time_col = dataset.time_column().ok_or(Error::NoTimeColumn)?;
    let time_idx = dataset
        .column_index(time_col)
        .ok_or_else(|| Error::UnknownVariable(time_col.to_string()))?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let observed: Vec<&str> = dataset.rows().iter().map(|r| r[time_idx].as_str()).collect();
    let numeric = match ordering {
        TimeOrdering::Numeric => true,
        TimeOrdering::Lexical => false,
        TimeOrdering::Auto => observed.iter().all(|l| l.parse::<i64>().is_ok()),
    };

    // The axis of window positions, one entry per time label, plus a grouping
    // key for each row.
    let (axis, row_slots): (Vec<String>, Vec<usize>) = if numeric {
        let parsed: Vec<i64> = observed
            .iter()
            .map(|l| {
                l.parse::<i64>()
                    .map_err(|_| Error::InvalidTimeLabel(l.to_string()))
            })
            .collect::<Result<_>>()?;
        let min = *parsed.iter().min().expect("nonempty");
        let max = *parsed.iter().max().expect("nonempty");
        let axis: Vec<String> = (min..=max).map(|v| v.to_string()).collect();
        let slots = parsed.iter().map(|v| (v - min) as usize).collect();
        (axis, slots)
    } else {
        let mut labels: Vec<String> = Vec::new();
        for l in &observed {
            if !labels.iter().any(|k| k == l) {
                labels.push(l.to_string());
            }
        }
        labels.sort();
        let slots = observed
            .iter()
            .map(|l| labels.iter().position(|k| k == l).expect("present"))
            .collect();
        (labels, slots)
    };

    let mut windows = Vec::new();
    let mut gaps = Vec::new();
    let mut start = 0usize;
    while start + spec.width <= axis.len() {
        let end = start + spec.width; // exclusive
        let label = format!("{}..{}", axis[start], axis[end - 1]);
        let rows: Vec<Vec<String>> = dataset
            .rows()
            .iter()
            .zip(&row_slots)
            .filter(|(_, &slot)| slot >= start && slot < end)
            .map(|(row, _)| row.clone())
            .collect();
        if rows.is_empty() {
            gaps.push(label);
        } else {
            let mut sub = CategoricalDataset::new(dataset.columns().to_vec(), rows)?;
            sub.time_column = dataset.time_column.clone();
            sub.declared_alphabets = dataset.declared_alphabets.clone();
            windows.push((label, sub));
        }
        start += spec.step;
    }

    Ok(WindowedDatasets { windows, gaps })
}

/// Which alphabets each window's distribution is built over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AlphabetScope {
    /// The full dataset's observed alphabets, so maximum entropy and
    /// zero-cell structure are comparable across windows.
    #[default]
    FullDataset,
    /// Only the values observed inside each window.
    PerWindow,
}

/// Configuration for [`measure_series`].
#[derive(Clone, Debug)]
pub struct SeriesOptions {
    pub ordering: TimeOrdering,
    pub alphabet_scope: AlphabetScope,
    pub measure: MeasureOptions,
    /// Conditioning set for the conditional transmission.
    pub given: Option<VariableSet>,
    /// Evaluate windows on the rayon pool when the `parallel` feature is
    /// enabled. Results are assembled in window order either way.
    pub parallel: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            ordering: TimeOrdering::default(),
            alphabet_scope: AlphabetScope::default(),
            measure: MeasureOptions::default(),
            given: None,
            parallel: true,
        }
    }
}

impl SeriesOptions {
    pub fn new() -> Self {
        SeriesOptions::default()
    }
}

/// One evaluated window.
#[derive(Clone, Debug)]
pub struct SeriesPoint {
    pub label: String,
    pub report: MeasureReport,
}

/// A measure evaluated per window, in time order.
#[derive(Clone, Debug)]
pub struct MeasureSeries {
    pub measure_name: String,
    pub variables: VariableSet,
    pub points: Vec<SeriesPoint>,
    pub gaps: Vec<String>,
}

/// Counts each window into a distribution and evaluates `kind` on it.
pub fn measure_series(
    dataset: &CategoricalDataset,
    vars: &VariableSet,
    kind: MeasureKind,
    spec: &WindowSpec,
    options: &SeriesOptions,
) -> Result<MeasureSeries> {
    if let Some(time_col) = dataset.time_column() {
        if let Some(v) = vars.iter().find(|v| v.name() == time_col) {
            return Err(Error::TimeColumnInVars(v.name().to_string()));
        }
    }

    let mut windowed = window_datasets(dataset, spec, options.ordering)?;

    // The per-window distribution must also carry the conditioning
    // variables.
    let record_vars = match &options.given {
        Some(given) => vars.union_disjoint(given)?,
        None => vars.clone(),
    };

    if options.alphabet_scope == AlphabetScope::FullDataset {
        let mut alphabets = dataset.declared_alphabets.clone();
        for var in record_vars.iter() {
            alphabets
                .entry(var.name().to_string())
                .or_insert(dataset.observed_alphabet(var.name())?);
        }
        for (_, sub) in &mut windowed.windows {
            sub.declare_alphabets(alphabets.clone());
        }
    }

    let evaluate = |(label, sub): &(String, CategoricalDataset)| -> Result<SeriesPoint> {
        let run = || -> Result<SeriesPoint> {
            let dist = JointDistribution::from_records(sub, &record_vars)?;
            let report =
                measures::measure_report(&dist, kind, vars, options.given.as_ref(), &options.measure)?;
            Ok(SeriesPoint {
                label: label.clone(),
                report,
            })
        };
        run().map_err(|e| Error::Window {
            label: label.clone(),
            source: Box::new(e),
        })
    };

    let points = evaluate_windows(&windowed.windows, options.parallel, evaluate)?;

    Ok(MeasureSeries {
        measure_name: kind.token().to_string(),
        variables: vars.clone(),
        points,
        gaps: windowed.gaps,
    })
}

#[cfg(feature = "parallel")]
fn evaluate_windows<F>(
    windows: &[(String, CategoricalDataset)],
    parallel: bool,
    evaluate: F,
) -> Result<Vec<SeriesPoint>>
where
    F: Fn(&(String, CategoricalDataset)) -> Result<SeriesPoint> + Send + Sync,
{
    if parallel {
        windows.par_iter().map(evaluate).collect()
    } else {
        windows.iter().map(evaluate).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn evaluate_windows<F>(
    windows: &[(String, CategoricalDataset)],
    _parallel: bool,
    evaluate: F,
) -> Result<Vec<SeriesPoint>>
where
    F: Fn(&(String, CategoricalDataset)) -> Result<SeriesPoint> + Send + Sync,
{
    windows.iter().map(evaluate).collect()
}
