//! Model documents, numeric tables and result tables.
//!
//! Models are stored as JSON with every float written to 17 significant
//! digits, which round-trips doubles exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::bench::BenchReport;
use crate::error::{Error, Result};
use crate::extend::ExtensionResult;
use crate::model::TrainingModel;

pub const FORMAT_VERSION: u32 = 1;

/// Serialized form of a [`TrainingModel`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub ambient_dim: usize,
    pub embed_dim: usize,
    pub epsilon: f64,
    pub curvature_c: f64,
    pub points: Vec<Vec<f64>>,
    pub images: Vec<Vec<f64>>,
}

/// Formats a double with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_rows(out: &mut String, rows: &[Vec<f64>]) {
    out.push('[');
    for (i, row) in rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            out.push_str(&fmt_f64(*v));
        }
        out.push(']');
    }
    out.push_str(if rows.is_empty() { "]" } else { "\n  ]" });
}

impl ModelFile {
    pub fn from_model(model: &TrainingModel) -> Self {
        let rows = |buf: &[f64], dim: usize| buf.chunks_exact(dim).map(<[f64]>::to_vec).collect();
        ModelFile {
            format_version: FORMAT_VERSION,
            ambient_dim: model.ambient_dim(),
            embed_dim: model.embed_dim(),
            epsilon: model.epsilon(),
            curvature_c: model.curvature_c(),
            points: rows(model.points(), model.ambient_dim()),
            images: rows(model.images(), model.embed_dim()),
        }
    }

    /// Renders the JSON document. Non-finite values are rejected.
    pub fn to_document(&self) -> Result<String> {
        let finite = |rows: &[Vec<f64>]| rows.iter().flatten().all(|v| v.is_finite());
        if !self.epsilon.is_finite() {
            return Err(Error::SerializationRejected("epsilon"));
        }
        if !self.curvature_c.is_finite() {
            return Err(Error::SerializationRejected("curvature_c"));
        }
        if !finite(&self.points) {
            return Err(Error::SerializationRejected("points"));
        }
        if !finite(&self.images) {
            return Err(Error::SerializationRejected("images"));
        }
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"format_version\": {},", self.format_version);
        let _ = writeln!(out, "  \"ambient_dim\": {},", self.ambient_dim);
        let _ = writeln!(out, "  \"embed_dim\": {},", self.embed_dim);
        let _ = writeln!(out, "  \"epsilon\": {},", fmt_f64(self.epsilon));
        let _ = writeln!(out, "  \"curvature_c\": {},", fmt_f64(self.curvature_c));
        out.push_str("  \"points\": ");
        push_rows(&mut out, &self.points);
        out.push_str(",\n  \"images\": ");
        push_rows(&mut out, &self.images);
        out.push_str("\n}\n");
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ParseFailure {
            row: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string(),
        })
    }

    /// Checks every model invariant and builds the model.
    pub fn into_model(self) -> Result<TrainingModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::ValidationFailure(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.points.len() != self.images.len() {
            return Err(Error::ValidationFailure(format!(
                "{} point rows but {} image rows",
                self.points.len(),
                self.images.len()
            )));
        }
        let check = |rows: &[Vec<f64>], dim: usize, what: &str| {
            match rows.iter().position(|r| r.len() != dim) {
                Some(j) => Err(Error::ValidationFailure(format!(
                    "{what} row {j} has {} entries, expected {dim}",
                    rows[j].len()
                ))),
                None => Ok(()),
            }
        };
        check(&self.points, self.ambient_dim, "points")?;
        check(&self.images, self.embed_dim, "images")?;
        TrainingModel::new(
            self.ambient_dim,
            self.embed_dim,
            self.points.concat(),
            self.images.concat(),
            self.epsilon,
            self.curvature_c,
        )
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn save_model(model: &TrainingModel, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &ModelFile::from_model(model).to_document()?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainingModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelFile::parse(&text)?.into_model()
}

/// Parses a comma-separated numeric table with an optional header line.
pub fn parse_points_table(text: &str, expected_dim: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ParseFailure {
            row: e.position().map(|p| p.line() as usize),
            column: None,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if i == 0 && parsed.iter().any(|v| v.is_err()) {
            continue;
        }
        if record.len() != expected_dim {
            return Err(Error::DimensionMismatch {
                row: line,
                expected: expected_dim,
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(expected_dim);
        for (k, v) in parsed.into_iter().enumerate() {
            match v {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::ParseFailure {
                        row: Some(line),
                        column: Some(k + 1),
                        message: format!("expected a finite number, found {:?}", &record[k]),
                    })
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a table of `expected_dim`-vectors; see [`parse_points_table`].
pub fn read_points_table(path: impl AsRef<Path>, expected_dim: usize) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points_table(&text, expected_dim)
}

/// Reads a numeric table whose width is taken from its first data row.
/// A file without data rows gives an empty table.
pub fn read_table(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let width = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .find(|l| l.split(',').all(|f| f.trim().parse::<f64>().is_ok()))
        .map(|l| l.split(',').count());
    match width {
        Some(w) => parse_points_table(&text, w),
        None => Ok(Vec::new()),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Per-query outcomes with optional anomaly flags.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResultsOptions {
    /// Adds an `anomalous` column, true where `score > threshold`.
    pub threshold: Option<f64>,
}

/// Writes `query_id, y_1..y_d, score, neighbor_count, epsilon_used` rows.
/// Failed queries leave the numeric cells empty and fill a trailing
/// `error` column, which is present only if some query failed.
pub fn write_outcomes(
    outcomes: &[Result<ExtensionResult>],
    embed_dim: usize,
    opts: ResultsOptions,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let with_errors = outcomes.iter().any(|o| o.is_err());
    let mut header = vec!["query_id".to_string()];
    header.extend((1..=embed_dim).map(|k| format!("y_{k}")));
    header.extend(["score", "neighbor_count", "epsilon_used"].map(String::from));
    if opts.threshold.is_some() {
        header.push("anomalous".into());
    }
    if with_errors {
        header.push("error".into());
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (id, outcome) in outcomes.iter().enumerate() {
        let mut row = vec![id.to_string()];
        match outcome {
            Ok(r) => {
                row.extend(r.embedding.iter().map(|v| fmt_f64(*v)));
                row.push(fmt_f64(r.score));
                row.push(r.neighbor_count.to_string());
                row.push(fmt_f64(r.epsilon_used));
                if let Some(t) = opts.threshold {
                    row.push((r.score > t).to_string());
                }
                if with_errors {
                    row.push(String::new());
                }
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), embed_dim + 3));
                if opts.threshold.is_some() {
                    row.push(String::new());
                }
                row.push(e.to_string());
            }
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes successful extension results; the embedding width is taken from
/// the first result.
pub fn write_results(results: &[ExtensionResult], path: impl AsRef<Path>) -> Result<()> {
    let d = results.first().map_or(0, |r| r.embedding.len());
    let outcomes: Vec<Result<ExtensionResult>> = results.iter().cloned().map(Ok).collect();
    write_outcomes(&outcomes, d, ResultsOptions::default(), path)
}

pub const BENCH_SUMMARY_HEADER: [&str; 13] = [
    "scheme",
    "training_size",
    "num_queries",
    "mean_error",
    "max_error",
    "delta",
    "lipschitz_k",
    "error_bound",
    "bound_violations",
    "failures",
    "seed",
    "epsilon",
    "curvature_c",
];

/// One summary row per report.
pub fn write_bench_summary(reports: &[BenchReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(BENCH_SUMMARY_HEADER).map_err(|e| csv_err(path, e))?;
    for r in reports {
        w.write_record([
            r.scheme.label().to_string(),
            r.training_size.to_string(),
            r.num_queries.to_string(),
            fmt_f64(r.mean_error),
            fmt_f64(r.max_error),
            fmt_f64(r.delta),
            fmt_f64(r.lipschitz_k),
            fmt_f64(r.error_bound()),
            r.bound_violations.to_string(),
            r.failures.to_string(),
            r.seed.to_string(),
            fmt_f64(r.epsilon),
            fmt_f64(r.curvature_c),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `scheme, training_size, query_id, error` rows; failures have an empty error.
pub fn write_bench_queries(reports: &[BenchReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["scheme", "training_size", "query_id", "error"])
        .map_err(|e| csv_err(path, e))?;
    for r in reports {
        for (q, e) in r.per_query_errors.iter().enumerate() {
            w.write_record([
                r.scheme.label().to_string(),
                r.training_size.to_string(),
                q.to_string(),
                e.map(fmt_f64).unwrap_or_default(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes rows of numbers under `header`.
pub fn write_table(header: &[&str], rows: &[Vec<f64>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
