//! CSV and JSON rendering of tables and verification reports.

use serde_json::{Map, Value};

use crate::config::ARTIFACT;
use crate::suite::VerificationReport;

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(Option<String>),
    Flag(bool),
}

/// Header lines and rows of one artifact.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    /// `key=value` pairs, re-parseable as a configuration.
    pub metadata: Vec<(String, String)>,
    /// Values derived while running, such as a located exceptional point.
    pub resolved: Vec<(String, f64)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Number(v) => format_float(*v),
        Cell::Text(t) => t.clone().unwrap_or_default(),
        Cell::Flag(b) => b.to_string(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Number(v) if v.is_finite() => Value::from(*v),
        // JSON has no NaN or infinity; keep them as strings so nothing is lost.
        Cell::Number(v) => Value::String(v.to_string()),
        Cell::Text(t) => t.clone().map_or(Value::Null, Value::String),
        Cell::Flag(b) => Value::Bool(*b),
    }
}

pub fn render_csv(table: &Table) -> String {
    let mut out = format!("# artifact={ARTIFACT}\n");
    for (k, v) in &table.metadata {
        out.push_str(&format!("# {k}={v}\n"));
    }
    for (k, v) in &table.resolved {
        out.push_str(&format!("# resolved.{k}={}\n", format_float(*v)));
    }
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    // Writing into memory cannot fail.
    writer.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        writer.write_record(row.iter().map(cell_text)).expect("in-memory write");
    }
    let body = writer.into_inner().expect("in-memory flush");
    out.push_str(&String::from_utf8(body).expect("CSV of UTF-8 cells is UTF-8"));
    out
}

pub fn render_json(table: &Table) -> String {
    let mut metadata = Map::new();
    metadata.insert("artifact".into(), Value::String(ARTIFACT.into()));
    for (k, v) in &table.metadata {
        metadata.insert(k.clone(), Value::String(v.clone()));
    }
    if !table.resolved.is_empty() {
        let resolved: Map<String, Value> = table.resolved.iter().map(|(k, v)| (k.clone(), cell_json(&Cell::Number(*v)))).collect();
        metadata.insert("resolved".into(), Value::Object(resolved));
    }
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| Value::Object(table.columns.iter().cloned().zip(row.iter().map(cell_json)).collect()))
        .collect();
    let mut root = Map::new();
    root.insert("metadata".into(), Value::Object(metadata));
    root.insert("rows".into(), Value::Array(records));
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialize");
    text.push('\n');
    text
}

/// A report as a table with one row per check and a final `overall` row.
pub fn report_table(report: &VerificationReport, metadata: Vec<(String, String)>) -> Table {
    let columns = ["name", "relation", "target", "observed", "tolerance", "pass"].map(String::from).to_vec();
    let mut rows: Vec<Vec<Cell>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(Some(c.name.clone())),
                Cell::Text(Some(c.relation.as_str().into())),
                Cell::Number(c.target),
                Cell::Number(c.observed),
                Cell::Number(c.tolerance),
                Cell::Flag(c.pass),
            ]
        })
        .collect();
    rows.push(vec![
        Cell::Text(Some("overall".into())),
        Cell::Text(None),
        Cell::Number(f64::NAN),
        Cell::Number(f64::NAN),
        Cell::Number(f64::NAN),
        Cell::Flag(report.pass()),
    ]);
    Table { metadata, resolved: Vec::new(), columns, rows }
}
