//! Numeric tabular datasets and CSV ingestion.
//!
//! A [`Dataset`] is an immutable row-major matrix of finite reals. Rows keep
//! the order in which they appear in the source file; downstream tie-breaking
//! relies on that order, so nothing in this module ever reorders rows.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: io::Error },
    #[error("malformed delimited text: {0}")]
    Parse(String),
    #[error("ragged rows: record {record} has {found} fields, expected {expected}")]
    Ragged {
        record: usize,
        expected: usize,
        found: usize,
    },
    #[error("no numeric columns")]
    NoNumericColumns,
    #[error("no rows")]
    NoRows,
    #[error("non-numeric value {value:?} in column {column:?} (record {record})")]
    NonNumeric {
        column: String,
        record: usize,
        value: String,
    },
    #[error("missing or non-finite value in column {column:?} (record {record})")]
    MissingValue { column: String, record: usize },
    #[error("{expected} column names supplied but the file has {found} columns")]
    ColumnNameCount { expected: usize, found: usize },
    #[error("column index {index} out of range for {n_cols} columns")]
    ColumnOutOfRange { index: usize, n_cols: usize },
    #[error("row {row} has {found} values, expected {expected}")]
    Shape {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// What to do with rows that contain a missing or non-finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaPolicy {
    #[default]
    Error,
    DropRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub has_header: bool,
    pub drop_non_numeric: bool,
    pub na_policy: NaPolicy,
    pub delimiter: u8,
    /// Names to use when the file has no header row. Ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_names: Option<Vec<String>>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            drop_non_numeric: true,
            na_policy: NaPolicy::Error,
            delimiter: b',',
            column_names: None,
        }
    }
}

/// Side information produced while loading: what was left out and why.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadReport {
    pub records_read: usize,
    pub dropped_columns: Vec<String>,
    pub dropped_rows: Vec<usize>,
    pub n_rows: usize,
    pub n_cols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    row_ids: Vec<usize>,
    column_names: Vec<String>,
    n_rows: usize,
    n_cols: usize,
}

impl Dataset {
    /// Builds a dataset from row vectors, with row identifiers `0..n`.
    pub fn from_rows(rows: Vec<Vec<f64>>, column_names: Vec<String>) -> Result<Self, DatasetError> {
        let n_cols = column_names.len();
        if n_cols == 0 {
            return Err(DatasetError::NoNumericColumns);
        }
        if rows.is_empty() {
            return Err(DatasetError::NoRows);
        }
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(DatasetError::Shape {
                    row: i,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { row: i, col: j });
            }
            values.extend_from_slice(row);
        }
        let n_rows = rows.len();
        Ok(Self {
            values,
            row_ids: (0..n_rows).collect(),
            column_names,
            n_rows,
            n_cols,
        })
    }

    /// Convenience constructor with generated column names `x0, x1, ...`.
    pub fn from_unnamed_rows(rows: Vec<Vec<f64>>) -> Result<Self, DatasetError> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let names = (0..n_cols).map(|j| format!("x{j}")).collect();
        Self::from_rows(rows, names)
    }

    /// Same row identifiers and column names, new values. Used by transforms.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            row_ids: self.row_ids.clone(),
            column_names: self.column_names.clone(),
            n_rows: self.n_rows,
            n_cols: self.n_cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    /// Row `i` as a slice. Panics if `i >= n_rows`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols)
    }

    /// Values of column `j` in row order.
    pub fn column_slice(&self, j: usize) -> Result<Vec<f64>, DatasetError> {
        if j >= self.n_cols {
            return Err(DatasetError::ColumnOutOfRange {
                index: j,
                n_cols: self.n_cols,
            });
        }
        Ok(self.rows().map(|r| r[j]).collect())
    }

    /// Writes the dataset as CSV with a header row. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, writer: W, delimiter: u8) -> Result<(), DatasetError> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(writer);
        let to_err = |e: csv::Error| DatasetError::Parse(e.to_string());
        w.write_record(&self.column_names).map_err(to_err)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(to_err)?;
        }
        w.flush().map_err(|e| DatasetError::Parse(e.to_string()))?;
        Ok(())
    }
}

fn is_missing_token(s: &str) -> bool {
    matches!(
        s.to_ascii_lowercase().as_str(),
        "" | "na" | "n/a" | "nan" | "null" | "?"
    )
}

enum Cell {
    Number(f64),
    Missing,
    Text,
}

fn classify(raw: &str) -> Cell {
    let s = raw.trim();
    if is_missing_token(s) {
        return Cell::Missing;
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Cell::Number(v),
        Ok(_) => Cell::Missing,
        Err(_) => Cell::Text,
    }
}

/// Loads a delimited text file into a [`Dataset`].
pub fn load_csv(
    path: &Path,
    options: &IngestOptions,
) -> Result<(Dataset, LoadReport), DatasetError> {
    let mut buf = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|source| DatasetError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
    load_csv_from_reader(buf.as_slice(), options)
}

pub fn load_csv_from_reader<R: Read>(
    reader: R,
    options: &IngestOptions,
) -> Result<(Dataset, LoadReport), DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .delimiter(options.delimiter)
        .flexible(false)
        .from_reader(reader);

    let map_csv_err = |e: csv::Error| match e.kind() {
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => DatasetError::Ragged {
            record: pos.as_ref().map_or(0, |p| p.record() as usize),
            expected: *expected_len as usize,
            found: *len as usize,
        },
        _ => DatasetError::Parse(e.to_string()),
    };

    let header: Option<Vec<String>> = if options.has_header {
        Some(
            rdr.headers()
                .map_err(map_csv_err)?
                .iter()
                .map(|h| h.trim().to_string())
                .collect(),
        )
    } else {
        None
    };

    let mut records = Vec::new();
    for rec in rdr.records() {
        records.push(rec.map_err(map_csv_err)?);
    }

    let width = header
        .as_ref()
        .map(Vec::len)
        .or_else(|| records.first().map(|r| r.len()))
        .unwrap_or(0);
    // The csv reader checks records against each other; check against the header too.
    if let Some((i, r)) = records.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(DatasetError::Ragged {
            record: i,
            expected: width,
            found: r.len(),
        });
    }

    let names: Vec<String> = match (header, &options.column_names) {
        (Some(h), _) => h,
        (None, Some(given)) => {
            if given.len() != width {
                return Err(DatasetError::ColumnNameCount {
                    expected: given.len(),
                    found: width,
                });
            }
            given.clone()
        }
        (None, None) => (0..width).map(|j| format!("col{j}")).collect(),
    };

    if records.is_empty() {
        return Err(DatasetError::NoRows);
    }

    // A column is numeric when every non-missing cell parses as a finite real.
    let mut text_cell: Vec<Option<(usize, String)>> = vec![None; width];
    for (i, rec) in records.iter().enumerate() {
        for (j, raw) in rec.iter().enumerate() {
            if text_cell[j].is_none() && matches!(classify(raw), Cell::Text) {
                text_cell[j] = Some((i, raw.to_string()));
            }
        }
    }

    let mut report = LoadReport {
        records_read: records.len(),
        ..LoadReport::default()
    };
    let mut kept = Vec::new();
    for (j, bad) in text_cell.into_iter().enumerate() {
        match bad {
            None => kept.push(j),
            Some(_) if options.drop_non_numeric => report.dropped_columns.push(names[j].clone()),
            Some((record, value)) => {
                return Err(DatasetError::NonNumeric {
                    column: names[j].clone(),
                    record,
                    value,
                })
            }
        }
    }
    if kept.is_empty() {
        return Err(DatasetError::NoNumericColumns);
    }

    let mut rows = Vec::with_capacity(records.len());
    'records: for (i, rec) in records.iter().enumerate() {
        let mut row = Vec::with_capacity(kept.len());
        for &j in &kept {
            match classify(&rec[j]) {
                Cell::Number(v) => row.push(v),
                _ => match options.na_policy {
                    NaPolicy::Error => {
                        return Err(DatasetError::MissingValue {
                            column: names[j].clone(),
                            record: i,
                        })
                    }
                    NaPolicy::DropRow => {
                        report.dropped_rows.push(i);
                        continue 'records;
                    }
                },
            }
        }
        rows.push(row);
    }

    let kept_names = kept.iter().map(|&j| names[j].clone()).collect();
    let dataset = Dataset::from_rows(rows, kept_names)?;
    report.n_rows = dataset.n_rows();
    report.n_cols = dataset.n_cols();
    Ok((dataset, report))
}
