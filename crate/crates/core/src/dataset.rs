//! Structured datasets: a feature matrix plus one expected output per row.

use std::io::Read;

use thiserror::Error;

use crate::decimal::{DecimalError, DecimalReal};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset is empty")]
    Empty,
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: a record needs at least one feature and an output, found {found} field(s)")]
    TooFewColumns { line: u64, found: usize },
    #[error("row {row}, column {column}: missing value")]
    Missing { row: usize, column: usize },
    #[error("row {row}, column {column}: {source}")]
    Parse {
        row: usize,
        column: usize,
        #[source]
        source: DecimalError,
    },
    #[error("invalid dataset shape: {0}")]
    Shape(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Skip the first record.
    pub has_header: bool,
}

/// An `m x n` feature matrix and its length-`m` output vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    rows: Vec<Vec<DecimalReal>>,
    outputs: Vec<DecimalReal>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<DecimalReal>>, outputs: Vec<DecimalReal>) -> Result<Self, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::Empty);
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(DatasetError::Shape("rows must have at least one feature".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(DatasetError::Shape(format!(
                "row {i} has {} features, expected {n}",
                rows[i].len()
            )));
        }
        if outputs.len() != rows.len() {
            return Err(DatasetError::Shape(format!(
                "{} rows but {} outputs",
                rows.len(),
                outputs.len()
            )));
        }
        Ok(Dataset { rows, outputs })
    }

    /// Number of training examples.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of features.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<DecimalReal>] {
        &self.rows
    }

    pub fn outputs(&self) -> &[DecimalReal] {
        &self.outputs
    }

    pub fn value(&self, i: usize, j: usize) -> &DecimalReal {
        &self.rows[i][j]
    }

    /// The first `len` rows. `len` is clamped to `1..=m`.
    pub fn prefix(&self, len: usize) -> Dataset {
        let len = len.clamp(1, self.m());
        Dataset {
            rows: self.rows[..len].to_vec(),
            outputs: self.outputs[..len].to_vec(),
        }
    }

    /// Writes the dataset back as headerless CSV, output last.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (row, o) in self.rows.iter().zip(&self.outputs) {
            for v in row {
                out.push_str(&v.to_string());
                out.push(',');
            }
            out.push_str(&o.to_string());
            out.push('\n');
        }
        out
    }
}

/// Distinct output values in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<DecimalReal>,
}

impl LabelSet {
    pub fn labels(&self) -> &[DecimalReal] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Index of `v` in first-occurrence order.
    pub fn position(&self, v: &DecimalReal) -> Option<usize> {
        self.labels.iter().position(|x| x == v)
    }
}

pub fn distinct_labels(ds: &Dataset) -> LabelSet {
    let mut labels: Vec<DecimalReal> = Vec::new();
    for o in ds.outputs() {
        if !labels.contains(o) {
            labels.push(o.clone());
        }
    }
    LabelSet { labels }
}

/// Reads a headerless (unless `options.has_header`) comma-separated file whose
/// last column is the expected output.
pub fn load_csv<R: Read>(source: R, options: CsvOptions) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut rows = Vec::new();
    let mut outputs = Vec::new();
    let mut width: Option<usize> = None;

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let found = record.len();
        match width {
            None if found < 2 => return Err(DatasetError::TooFewColumns { line, found }),
            None => width = Some(found),
            Some(expected) if expected != found => {
                return Err(DatasetError::Ragged {
                    line,
                    expected,
                    found,
                })
            }
            Some(_) => {}
        }

        let row_no = rows.len() + 1;
        let mut values = Vec::with_capacity(found);
        for (col, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(DatasetError::Missing {
                    row: row_no,
                    column: col + 1,
                });
            }
            let v = field.parse::<DecimalReal>().map_err(|source| DatasetError::Parse {
                row: row_no,
                column: col + 1,
                source,
            })?;
            values.push(v);
        }
        let output = values.pop().expect("record has at least two fields");
        rows.push(values);
        outputs.push(output);
    }

    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    Dataset::new(rows, outputs)
}
