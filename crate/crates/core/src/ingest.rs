//! Delimited-text ingestion: numeric tables, series selection and event lists.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::serde_nan;
use crate::synth::{Event, EventList};

/// Number of content lines inspected when sniffing the delimiter.
const SNIFF_LINES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8 text")]
    InvalidUtf8,
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column:?}: cell is not a number")]
    NonNumericCell { row: usize, column: String },
    #[error("header cell {index} is empty")]
    EmptyColumnName { index: usize },
    #[error("column name {0:?} appears more than once")]
    DuplicateColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("table has no rows")]
    EmptyTable,
    #[error("row {row}: abscissa value is not finite")]
    NonFiniteAbscissa { row: usize },
    #[error("x and y lengths differ ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("event file must have exactly 2 columns (time, weight), found {0}")]
    EventColumns(usize),
    #[error("row {row}: event time and weight must be finite")]
    NonFiniteEvent { row: usize },
    #[error("row {0}: event weight is negative")]
    NegativeWeight(usize),
}

impl IngestError {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            IngestError::InvalidUtf8 => "InvalidUtf8",
            IngestError::EmptyInput => "EmptyInput",
            IngestError::RaggedRows { .. } => "RaggedRows",
            IngestError::NonNumericCell { .. } => "NonNumericCell",
            IngestError::EmptyColumnName { .. } => "EmptyColumnName",
            IngestError::DuplicateColumn(_) => "DuplicateColumn",
            IngestError::UnknownColumn(_) => "UnknownColumn",
            IngestError::EmptyTable => "EmptyTable",
            IngestError::NonFiniteAbscissa { .. } => "NonFiniteAbscissa",
            IngestError::LengthMismatch { .. } => "LengthMismatch",
            IngestError::EventColumns(_) => "EventColumns",
            IngestError::NonFiniteEvent { .. } => "NonFiniteEvent",
            IngestError::NegativeWeight(_) => "NegativeWeight",
        }
    }

    /// Data-row index the error refers to, if any.
    pub fn row(&self) -> Option<usize> {
        match self {
            IngestError::RaggedRows { row, .. }
            | IngestError::NonNumericCell { row, .. }
            | IngestError::NonFiniteAbscissa { row }
            | IngestError::NonFiniteEvent { row }
            | IngestError::NegativeWeight(row) => Some(*row),
            _ => None,
        }
    }

    /// Column name the error refers to, if any.
    pub fn column(&self) -> Option<&str> {
        match self {
            IngestError::NonNumericCell { column, .. }
            | IngestError::DuplicateColumn(column)
            | IngestError::UnknownColumn(column) => Some(column),
            _ => None,
        }
    }
}

/// Field separator of a text table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delimiter {
    Char(char),
    /// One or more spaces/tabs.
    Whitespace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ParseOptions {
    /// `None` sniffs among comma, tab, semicolon and whitespace.
    pub delimiter: Option<Delimiter>,
    /// `None` treats the first row as a header when it has a non-numeric cell.
    pub has_header: Option<bool>,
    /// Read `1,5` as 1.5. Comma is then never sniffed as the delimiter.
    pub decimal_comma: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(with = "serde_nan")]
    pub values: Vec<f64>,
}

/// Named numeric columns of equal length.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct Table {
    columns: Vec<Column>,
    row_count: usize,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    columns: Vec<Column>,
    row_count: usize,
}

impl TryFrom<TableRepr> for Table {
    type Error = IngestError;

    fn try_from(repr: TableRepr) -> Result<Self, Self::Error> {
        let table = Table::new(repr.columns)?;
        if table.row_count != repr.row_count {
            return Err(IngestError::RaggedRows {
                row: table.row_count.min(repr.row_count),
                expected: repr.row_count,
                found: table.row_count,
            });
        }
        Ok(table)
    }
}

impl From<Table> for TableRepr {
    fn from(table: Table) -> Self {
        TableRepr {
            columns: table.columns,
            row_count: table.row_count,
        }
    }
}

impl PartialEq for Table {
    /// Cell-wise equality where NaN equals NaN.
    fn eq(&self, other: &Self) -> bool {
        self.row_count == other.row_count
            && self.columns.len() == other.columns.len()
            && self.columns.iter().zip(&other.columns).all(|(a, b)| {
                a.name == b.name
                    && a.values
                        .iter()
                        .zip(&b.values)
                        .all(|(u, v)| u == v || (u.is_nan() && v.is_nan()))
            })
    }
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self, IngestError> {
        let row_count = columns.first().map_or(0, |c| c.values.len());
        for (index, column) in columns.iter().enumerate() {
            if column.name.is_empty() {
                return Err(IngestError::EmptyColumnName { index });
            }
            if columns[..index].iter().any(|c| c.name == column.name) {
                return Err(IngestError::DuplicateColumn(column.name.clone()));
            }
            if column.values.len() != row_count {
                return Err(IngestError::RaggedRows {
                    row: row_count.min(column.values.len()),
                    expected: row_count,
                    found: column.values.len(),
                });
            }
        }
        Ok(Table { columns, row_count })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    /// Comma-separated text with a header row; NaN is written as an empty cell.
    pub fn to_csv(&self) -> String {
        let mut out = self.column_names().join(",");
        out.push('\n');
        for row in 0..self.row_count {
            for (i, column) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_cell(&mut out, column.values[row]);
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn write_cell(out: &mut String, value: f64) {
    if !value.is_nan() {
        // Display prints the shortest representation that parses back to the same f64.
        let _ = write!(out, "{value}");
    }
}

/// A 1D sequence of (x, y) points to plot and sonify. NaN in `y` marks a gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct Series {
    x: Vec<f64>,
    y: Vec<f64>,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    #[serde(with = "serde_nan")]
    x: Vec<f64>,
    #[serde(with = "serde_nan")]
    y: Vec<f64>,
    label: String,
}

impl TryFrom<SeriesRepr> for Series {
    type Error = IngestError;

    fn try_from(repr: SeriesRepr) -> Result<Self, Self::Error> {
        Series::new(repr.x, repr.y, repr.label)
    }
}

impl From<Series> for SeriesRepr {
    fn from(series: Series) -> Self {
        SeriesRepr {
            x: series.x,
            y: series.y,
            label: series.label,
        }
    }
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        let same = |a: &[f64], b: &[f64]| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(u, v)| u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()))
        };
        self.label == other.label && same(&self.x, &other.x) && same(&self.y, &other.y)
    }
}

impl Series {
    /// Requires `x.len() == y.len() >= 1` and finite `x`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, label: impl Into<String>) -> Result<Self, IngestError> {
        if x.len() != y.len() {
            return Err(IngestError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        if x.is_empty() {
            return Err(IngestError::EmptyTable);
        }
        if let Some(row) = x.iter().position(|v| !v.is_finite()) {
            return Err(IngestError::NonFiniteAbscissa { row });
        }
        Ok(Series {
            x,
            y,
            label: label.into(),
        })
    }

    /// Series over the implicit abscissa 0, 1, 2, …
    pub fn from_values(y: Vec<f64>, label: impl Into<String>) -> Result<Self, IngestError> {
        let x = (0..y.len()).map(|i| i as f64).collect();
        Series::new(x, y, label)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Same abscissa and label with new ordinates. Length must match.
    pub(crate) fn with_y(&self, y: Vec<f64>) -> Series {
        debug_assert_eq!(y.len(), self.x.len());
        Series {
            x: self.x.clone(),
            y,
            label: self.label.clone(),
        }
    }

    pub(crate) fn slice(&self, lo: usize, hi: usize) -> Series {
        Series {
            x: self.x[lo..=hi].to_vec(),
            y: self.y[lo..=hi].to_vec(),
            label: self.label.clone(),
        }
    }
}

fn decode(input: &[u8]) -> Result<&str, IngestError> {
    let text = std::str::from_utf8(input).map_err(|_| IngestError::InvalidUtf8)?;
    Ok(text.strip_prefix('\u{feff}').unwrap_or(text))
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|line| {
        let t = line.trim();
        !(t.is_empty() || t.starts_with('#') || t.starts_with('%'))
    })
}

fn strip_quotes(cell: &str) -> &str {
    let t = cell.trim();
    if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

fn split_line(line: &str, delimiter: Delimiter) -> Vec<String> {
    match delimiter {
        Delimiter::Whitespace => line
            .split_whitespace()
            .map(|c| strip_quotes(c).to_string())
            .collect(),
        Delimiter::Char(sep) => {
            let mut cells = Vec::new();
            let mut cell = String::new();
            let mut in_quotes = false;
            let mut chars = line.chars().peekable();
            while let Some(ch) = chars.next() {
                match ch {
                    '"' if in_quotes && chars.peek() == Some(&'"') => {
                        cell.push('"');
                        chars.next();
                    }
                    '"' => in_quotes = !in_quotes,
                    c if c == sep && !in_quotes => cells.push(std::mem::take(&mut cell)),
                    c => cell.push(c),
                }
            }
            cells.push(cell);
            cells.iter().map(|c| c.trim().to_string()).collect()
        }
    }
}

fn sniff_delimiter(lines: &[&str], decimal_comma: bool) -> Delimiter {
    let mut candidates = vec![Delimiter::Char('\t')];
    if !decimal_comma {
        candidates.push(Delimiter::Char(','));
    }
    candidates.push(Delimiter::Char(';'));
    candidates.push(Delimiter::Whitespace);

    let sample = &lines[..lines.len().min(SNIFF_LINES)];
    let mut best: Option<(usize, Delimiter)> = None;
    for &cand in &candidates {
        let counts: Vec<usize> = sample.iter().map(|l| split_line(l, cand).len()).collect();
        let width = counts[0];
        if width > 1 && counts.iter().all(|&c| c == width) && best.is_none_or(|(w, _)| width > w) {
            best = Some((width, cand));
        }
    }
    if let Some((_, delim)) = best {
        return delim;
    }
    // Nothing splits consistently: keep whichever splits the first line, so the
    // ragged row is reported against the intended delimiter.
    candidates
        .iter()
        .copied()
        .filter(|&c| split_line(sample[0], c).len() > 1)
        .max_by_key(|&c| split_line(sample[0], c).len())
        .unwrap_or(Delimiter::Whitespace)
}

fn parse_number(cell: &str, decimal_comma: bool) -> Option<f64> {
    if cell.is_empty() {
        return Some(f64::NAN);
    }
    let value = if decimal_comma {
        cell.replace(',', ".").parse::<f64>().ok()?
    } else {
        cell.parse::<f64>().ok()?
    };
    (!value.is_infinite()).then_some(value)
}

/// Parses delimited UTF-8 text into a [`Table`].
///
/// Lines starting with `#` or `%` and blank lines are skipped. Empty cells become NaN.
/// Headerless tables get columns `col0`, `col1`, …
pub fn parse_table(input: &[u8], options: &ParseOptions) -> Result<Table, IngestError> {
    let text = decode(input)?;
    let lines: Vec<&str> = content_lines(text).collect();
    if lines.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    let delimiter = options
        .delimiter
        .unwrap_or_else(|| sniff_delimiter(&lines, options.decimal_comma));
    let mut rows = lines.iter().map(|l| split_line(l, delimiter));
    let first = rows.next().expect("at least one content line");

    let has_header = options.has_header.unwrap_or_else(|| {
        first
            .iter()
            .any(|c| parse_number(c, options.decimal_comma).is_none())
    });
    let width = first.len();
    let (names, data_rows): (Vec<String>, Vec<Vec<String>>) = if has_header {
        (
            first.into_iter().map(|c| strip_quotes(&c).to_string()).collect(),
            rows.collect(),
        )
    } else {
        (
            (0..width).map(|i| format!("col{i}")).collect(),
            std::iter::once(first).chain(rows).collect(),
        )
    };
    if data_rows.is_empty() {
        return Err(IngestError::EmptyInput);
    }

    let mut values = vec![Vec::with_capacity(data_rows.len()); width];
    for (row, cells) in data_rows.iter().enumerate() {
        if cells.len() != width {
            return Err(IngestError::RaggedRows {
                row,
                expected: width,
                found: cells.len(),
            });
        }
        for (col, cell) in cells.iter().enumerate() {
            let v = parse_number(strip_quotes(cell), options.decimal_comma).ok_or_else(|| {
                IngestError::NonNumericCell {
                    row,
                    column: names[col].clone(),
                }
            })?;
            values[col].push(v);
        }
    }
    Table::new(
        names
            .into_iter()
            .zip(values)
            .map(|(name, values)| Column { name, values })
            .collect(),
    )
}

/// Picks the y column (and optionally the x column) out of a table.
/// Without `x_col` the abscissa is the row index.
pub fn select_series(table: &Table, x_col: Option<&str>, y_col: &str) -> Result<Series, IngestError> {
    if table.row_count() == 0 {
        return Err(IngestError::EmptyTable);
    }
    let lookup = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| IngestError::UnknownColumn(name.to_string()))
    };
    let y = lookup(y_col)?.values.clone();
    match x_col {
        Some(name) => Series::new(lookup(name)?.values.clone(), y, y_col),
        None => Series::from_values(y, y_col),
    }
}

/// Parses a two-column (time, weight) table into an [`EventList`] sorted by time.
pub fn parse_events(input: &[u8]) -> Result<EventList, IngestError> {
    let table = parse_table(input, &ParseOptions::default())?;
    if table.columns().len() != 2 {
        return Err(IngestError::EventColumns(table.columns().len()));
    }
    let times = &table.columns()[0].values;
    let weights = &table.columns()[1].values;
    let mut events = Vec::with_capacity(table.row_count());
    for (row, (&time, &weight)) in times.iter().zip(weights).enumerate() {
        if !time.is_finite() || !weight.is_finite() {
            return Err(IngestError::NonFiniteEvent { row });
        }
        if weight < 0.0 {
            return Err(IngestError::NegativeWeight(row));
        }
        events.push(Event { time, weight });
    }
    Ok(EventList::from_events(events).expect("events validated above"))
}
