//! CSV and JSON serialization of a [`Report`].
//!
//! CSV layout: `#`-prefixed `key: value` lines echoing the configuration,
//! one header row, the data rows, then `# summary.<key>: value` and
//! `# diagnostics.<key>: value` lines. Floats use 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;

use serde_json::{json, Map, Value};

use super::Report;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            // non-finite floats become null
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

fn config_lines(report: &Report) -> Vec<(String, Cell)> {
    let c = &report.config;
    let mut out: Vec<(String, Cell)> = vec![
        ("schema_version".into(), Cell::Int(SCHEMA_VERSION.into())),
        ("command".into(), c.command.name().into()),
        ("s".into(), c.params.s().into()),
        ("q".into(), c.params.q().into()),
        ("p".into(), c.params.p().into()),
        ("alpha".into(), c.params.alpha().into()),
        ("regime".into(), Cell::Text(c.params.regime().to_string())),
        ("n".into(), c.n.into()),
        ("replicas".into(), c.replicas.into()),
        ("seed".into(), c.seed.into()),
        ("r".into(), Cell::Int(c.r_order.into())),
        (
            "mechanism".into(),
            Cell::Text(format!("{:?}", c.mechanism).to_lowercase()),
        ),
    ];
    if !c.grid.is_empty() {
        let g: Vec<String> = c.grid.iter().map(|t| t.to_string()).collect();
        out.push(("grid".into(), Cell::Text(g.join(","))));
    }
    if !c.n_list.is_empty() {
        let g: Vec<String> = c.n_list.iter().map(|t| t.to_string()).collect();
        out.push(("n_list".into(), Cell::Text(g.join(","))));
    }
    out
}

pub fn to_csv(report: &Report) -> String {
    let mut s = String::new();
    for (k, v) in config_lines(report) {
        let _ = writeln!(s, "# {k}: {}", v.csv());
    }
    let _ = writeln!(s, "{}", report.columns.join(","));
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    for (k, v) in &report.summary {
        let _ = writeln!(s, "# summary.{k}: {}", v.csv());
    }
    for (k, v) in &report.diagnostics {
        let _ = writeln!(s, "# diagnostics.{k}: {}", v.csv());
    }
    s
}

pub fn to_json(report: &Report) -> String {
    let c = &report.config;
    let mut results = Map::new();
    for (k, v) in &report.summary {
        results.insert(k.clone(), v.json());
    }
    results.insert("columns".into(), json!(report.columns));
    results.insert(
        "rows".into(),
        Value::Array(
            report
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect(),
        ),
    );
    let diagnostics: Map<String, Value> = report
        .diagnostics
        .iter()
        .map(|(k, v)| (k.clone(), v.json()))
        .collect();
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": c.command.name(),
        "params": {
            "s": c.params.s(),
            "q": c.params.q(),
            "p": c.params.p(),
            "alpha": c.params.alpha(),
            "regime": c.params.regime(),
        },
        "n": c.n,
        "replicas": c.replicas,
        "seed": c.seed,
        "r": c.r_order,
        "grid": c.grid,
        "n_list": c.n_list,
        "mechanism": c.mechanism,
        "results": results,
        "diagnostics": diagnostics,
    });
    let mut out = serde_json::to_string_pretty(&value).expect("report is valid JSON");
    out.push('\n');
    out
}

pub fn write_all(mut w: impl Write, body: &str) -> std::io::Result<()> {
    w.write_all(body.as_bytes())?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(0.25), "2.5000000000000000e-1");
        let x = std::f64::consts::PI;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        assert_eq!(format_float(f64::NAN), "nan");
    }
}
