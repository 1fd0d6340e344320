//! Regression fixtures shared by the sensor tests.
//!
//! Set `QSENSE_UPDATE_FIXTURES=1` to rewrite the files from the current build.

use std::fmt::Write as _;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn render(columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

fn parse(text: &str) -> (String, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().to_string();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect()).collect();
    (header, rows)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Compares against the stored fixture cell by cell to relative tolerance `rel`.
pub fn check_fixture(name: &str, columns: &[&str], rows: &[Vec<f64>], rel: f64) {
    let path = fixture_path(name);
    let rendered = render(columns, rows);
    if std::env::var_os("QSENSE_UPDATE_FIXTURES").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, rendered).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing fixture {}: {e}", path.display()));
    let (header, expected) = parse(&stored);
    assert_eq!(header, columns.join(","));
    assert_eq!(expected.len(), rows.len(), "row count");
    for (k, (want, got)) in expected.iter().zip(rows).enumerate() {
        for (c, (w, g)) in want.iter().zip(got).enumerate() {
            assert!(close(*w, *g, rel), "row {k} column {}: stored {w} computed {g}", columns[c]);
        }
    }
}
