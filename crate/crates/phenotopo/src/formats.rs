//! Text formats for diagrams, distance matrices, branching events and
//! matrix summaries. All writers are deterministic.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read;

use phenotopo_core::{BranchingEvent, LabeledDistanceMatrix, MatrixError, MatrixSummary, PersistenceDiagram};
use serde::Serialize;
use thiserror::Error;

/// 17 significant digits, enough to read back the identical `f64`.
pub fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// Diagram as a JSON array of `{dim, birth, death, representative}`;
/// `death` is `null` for essential classes and `representative` is only
/// present in dimension 1. One pair per line.
pub fn diagram_json(diagram: &PersistenceDiagram) -> String {
    let mut out = String::from("[");
    for (k, pair) in diagram.pairs.iter().enumerate() {
        out.push_str(if k == 0 { "\n  " } else { ",\n  " });
        let death = if pair.is_essential() { "null".to_string() } else { exact(pair.death) };
        write!(out, "{{\"dim\": {}, \"birth\": {}, \"death\": {}", pair.dimension, exact(pair.birth), death).unwrap();
        if let Some(rep) = &pair.representative {
            out.push_str(", \"representative\": [");
            for (e, (i, j)) in rep.iter().enumerate() {
                if e > 0 {
                    out.push_str(", ");
                }
                write!(out, "[{i}, {j}]").unwrap();
            }
            out.push(']');
        }
        out.push('}');
    }
    out.push_str(if diagram.pairs.is_empty() { "]\n" } else { "\n]\n" });
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Labeled matrix: a header row `label,<labels...>`, then one row per label.
pub fn matrix_csv(matrix: &LabeledDistanceMatrix, precision: usize) -> String {
    let mut out = String::from("label");
    for l in matrix.labels() {
        out.push(',');
        out.push_str(&csv_field(l));
    }
    out.push('\n');
    for (label, row) in matrix.labels().iter().zip(matrix.rows()) {
        out.push_str(&csv_field(label));
        for v in row {
            write!(out, ",{v:.precision$}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Error)]
pub enum MatrixCsvError {
    #[error("matrix csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("matrix csv is empty")]
    Empty,
    #[error("matrix csv row {row}: expected label {expected:?}, found {found:?}")]
    LabelOrder { row: usize, expected: String, found: String },
    #[error("matrix csv row {row}: cannot parse {text:?} as a number")]
    Number { row: usize, text: String },
    #[error("matrix csv: {0}")]
    Matrix(#[from] MatrixError),
}

/// Reads a matrix written by [`matrix_csv`] (or any square labeled CSV with
/// rows in header order).
pub fn parse_matrix_csv<R: Read>(source: R) -> Result<LabeledDistanceMatrix, MatrixCsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(source);
    let mut records = reader.records();
    let header = records.next().ok_or(MatrixCsvError::Empty)??;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (idx, record) in records.enumerate() {
        let record = record?;
        let row = idx + 1;
        let found = record.get(0).unwrap_or_default().to_string();
        match labels.get(idx) {
            Some(expected) if *expected == found => {}
            Some(expected) => return Err(MatrixCsvError::LabelOrder { row, expected: expected.clone(), found }),
            None => return Err(MatrixError::Shape { labels: labels.len(), rows: row }.into()),
        }
        let values = record
            .iter()
            .skip(1)
            .map(|t| t.parse::<f64>().map_err(|_| MatrixCsvError::Number { row, text: t.to_string() }))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }
    Ok(LabeledDistanceMatrix::from_rows(labels, rows)?)
}

pub const EVENTS_HEADER: &str = "label,birth,death,persistence,jday_start,jday_end,seasons,cultivars";

fn joined(set: &BTreeSet<String>) -> String {
    set.iter().map(String::as_str).collect::<Vec<_>>().join(";")
}

/// One row per event; sets are `;`-joined in sorted order and an essential
/// class has death and persistence `inf`.
pub fn events_csv(label: &str, events: &[BranchingEvent]) -> String {
    let mut out = String::from(EVENTS_HEADER);
    out.push('\n');
    for e in events {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(label),
            e.birth,
            e.death,
            e.persistence,
            e.jday_start,
            e.jday_end,
            csv_field(&joined(&e.seasons)),
            csv_field(&joined(&e.cultivars)),
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct PairJson<'a> {
    a: &'a str,
    b: &'a str,
    value: f64,
}

#[derive(Serialize)]
struct RowMeanJson<'a> {
    label: &'a str,
    mean: f64,
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    global_mean: f64,
    max_row_mean: RowMeanJson<'a>,
    max_pair: PairJson<'a>,
    min_pair: PairJson<'a>,
    row_means: Vec<RowMeanJson<'a>>,
}

pub fn summary_json(summary: &MatrixSummary) -> String {
    let json = SummaryJson {
        global_mean: summary.global_mean,
        max_row_mean: RowMeanJson { label: &summary.max_row_mean.0, mean: summary.max_row_mean.1 },
        max_pair: PairJson { a: &summary.max_pair.a, b: &summary.max_pair.b, value: summary.max_pair.value },
        min_pair: PairJson { a: &summary.min_pair.a, b: &summary.min_pair.b, value: summary.min_pair.value },
        row_means: summary.row_means.iter().map(|(label, mean)| RowMeanJson { label, mean: *mean }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&json).expect("summary serializes");
    out.push('\n');
    out
}
