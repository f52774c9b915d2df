use std::io::Write;

use super::{ScenarioError, SweepResult};
use crate::projection::LensProjection;

/// Column order of every CSV this crate writes.
pub const CSV_HEADER: [&str; 9] = [
    "sweep_variable",
    "bearing_deg",
    "depth_m",
    "range_m",
    "model",
    "analytic_depth_error_m",
    "analytic_range_error_m",
    "oracle_range_error_m",
    "oracle_relative_deviation",
];

/// One data line of a sweep CSV, parsed back into numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    /// Value of the swept quantity (degrees, meters of depth, or meters of baseline).
    pub sweep_value: f64,
    pub bearing_deg: f64,
    pub depth_m: f64,
    pub range_m: f64,
    pub model: LensProjection,
    pub analytic_depth_error_m: f64,
    pub analytic_range_error_m: f64,
    pub oracle_range_error_m: Option<f64>,
    pub oracle_relative_deviation: Option<f64>,
}

fn optional(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write one header line and every row of every result, in order.
///
/// Floats use Rust's shortest round-trip formatting.
pub fn write_csv<W: Write>(results: &[&SweepResult], out: W) -> Result<(), ScenarioError> {
    if results.is_empty() || results.iter().any(|r| r.rows.is_empty()) {
        return Err(ScenarioError::Csv("nothing to write".into()));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let map = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => ScenarioError::Write(io),
        other => ScenarioError::Csv(format!("{other:?}")),
    };
    w.write_record(CSV_HEADER).map_err(map)?;
    for result in results {
        for row in &result.rows {
            let b = &row.budget;
            w.write_record([
                row.sweep_value.to_string(),
                b.bearing_rad.to_degrees().to_string(),
                b.depth_m.to_string(),
                b.range_m.to_string(),
                b.model.name().to_string(),
                b.analytic_depth_error_m.to_string(),
                b.analytic_range_error_m.to_string(),
                optional(b.oracle_range_error_m),
                optional(b.oracle_relative_deviation),
            ])
            .map_err(map)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parse a CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>, ScenarioError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| ScenarioError::Csv(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(ScenarioError::Csv(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut records = Vec::new();
    for (i, line) in reader.records().enumerate() {
        let line = line.map_err(|e| ScenarioError::Csv(e.to_string()))?;
        let at = |col: usize| -> Result<&str, ScenarioError> {
            line.get(col).ok_or_else(|| {
                ScenarioError::Csv(format!("row {}: missing column {}", i + 1, CSV_HEADER[col]))
            })
        };
        let number = |col: usize| -> Result<f64, ScenarioError> {
            at(col)?
                .parse::<f64>()
                .map_err(|e| ScenarioError::Csv(format!("row {}: {}: {e}", i + 1, CSV_HEADER[col])))
        };
        let maybe = |col: usize| -> Result<Option<f64>, ScenarioError> {
            if at(col)?.is_empty() {
                Ok(None)
            } else {
                number(col).map(Some)
            }
        };
        records.push(CsvRecord {
            sweep_value: number(0)?,
            bearing_deg: number(1)?,
            depth_m: number(2)?,
            range_m: number(3)?,
            model: at(4)?
                .parse()
                .map_err(|e| ScenarioError::Csv(format!("row {}: {e}", i + 1)))?,
            analytic_depth_error_m: number(5)?,
            analytic_range_error_m: number(6)?,
            oracle_range_error_m: maybe(7)?,
            oracle_relative_deviation: maybe(8)?,
        });
    }
    Ok(records)
}
