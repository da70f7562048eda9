//! CSV and JSON rendering of sweep tables and verification reports.
//!
//! Floats are written with 17 significant digits in CSV. Undefined bounds
//! are an empty cell in CSV and `null` in JSON; the companion
//! `<bound>_status` column holds `ok` or the reason.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use super::single::{ComputeReport, OptimizeOutput};
use super::sweep::SweepTable;
use super::verify::VerificationReport;
use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Report<'a> {
    Sweep(&'a SweepTable),
    Verification(&'a VerificationReport),
    Compute(&'a ComputeReport),
    Optimize(&'a OptimizeOutput),
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

const EXACT_COLUMNS: [&str; 4] = ["theta", "variance_product", "variance_sum", "std_sum"];

pub fn sweep_header(table: &SweepTable) -> Vec<String> {
    let mut h: Vec<String> = EXACT_COLUMNS.iter().map(|s| s.to_string()).collect();
    for id in &table.bounds {
        h.push(id.as_str().to_owned());
        h.push(format!("{id}_status"));
    }
    h
}

fn status(r: &crate::BoundResult) -> String {
    if r.defined {
        "ok".into()
    } else {
        r.reason.clone().unwrap_or_else(|| "undefined".into())
    }
}

fn csv_string(header: &[String], rows: Vec<Vec<String>>) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| HarnessError::Serialize(e.to_string());
    w.write_record(header).map_err(ser)?;
    for row in rows {
        w.write_record(&row).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Serialize(e.to_string()))
}

pub fn sweep_csv(table: &SweepTable) -> Result<String, HarnessError> {
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let mut cells =
                vec![float(row.theta), float(row.variance_product), float(row.variance_sum), float(row.std_sum)];
            for r in &row.bounds {
                cells.push(r.finite().map(float).unwrap_or_default());
                cells.push(status(r));
            }
            cells
        })
        .collect();
    csv_string(&sweep_header(table), rows)
}

pub fn sweep_json(table: &SweepTable) -> Value {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("theta".into(), number(row.theta));
            obj.insert("variance_product".into(), number(row.variance_product));
            obj.insert("variance_sum".into(), number(row.variance_sum));
            obj.insert("std_sum".into(), number(row.std_sum));
            for r in &row.bounds {
                obj.insert(r.id.as_str().into(), r.finite().map_or(Value::Null, number));
                obj.insert(format!("{}_status", r.id), json!(status(r)));
            }
            Value::Object(obj)
        })
        .collect();
    json!({
        "metadata": table.metadata,
        "columns": sweep_header(table),
        "rows": rows,
    })
}

pub fn verification_csv(report: &VerificationReport) -> Result<String, HarnessError> {
    let header: Vec<String> = ["kind", "name", "evaluated", "undefined", "undefined_fraction", "max_slack"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for (kind, table) in [("bound", &report.bounds), ("check", &report.checks)] {
        for (name, s) in table {
            rows.push(vec![
                kind.to_owned(),
                name.clone(),
                s.evaluated.to_string(),
                s.undefined.to_string(),
                float(s.undefined_fraction),
                s.max_slack.map(float).unwrap_or_default(),
            ]);
        }
    }
    csv_string(&header, rows)
}

pub fn verification_json(report: &VerificationReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report is plain data");
    v["metadata"] = json!({ "version": env!("CARGO_PKG_VERSION") });
    v
}

pub fn compute_csv(report: &ComputeReport) -> Result<String, HarnessError> {
    let header: Vec<String> =
        ["bound", "side", "quantity", "exact", "value", "status"].iter().map(|s| s.to_string()).collect();
    let rows = report
        .bounds
        .iter()
        .map(|r| {
            vec![
                r.id.as_str().to_owned(),
                format!("{:?}", r.id.side()).to_lowercase(),
                format!("{:?}", r.id.quantity()).to_lowercase(),
                float(report.exact.get(r.id.quantity())),
                r.finite().map(float).unwrap_or_default(),
                status(r),
            ]
        })
        .collect();
    csv_string(&header, rows)
}

pub fn compute_json(report: &ComputeReport) -> Value {
    json!({
        "observable_a": report.observable_a,
        "observable_b": report.observable_b,
        "pure": report.pure,
        "moments": report.moments,
        "exact": report.exact,
        "bounds": report.bounds,
        "metadata": { "version": env!("CARGO_PKG_VERSION") },
    })
}

pub fn optimize_csv(out: &OptimizeOutput) -> Result<String, HarnessError> {
    let header = vec!["restart".to_owned(), "value".to_owned()];
    let rows = out.report.trace.iter().map(|&(i, v)| vec![i.to_string(), float(v)]).collect();
    csv_string(&header, rows)
}

pub fn optimize_json(out: &OptimizeOutput) -> Value {
    let r = &out.report;
    let basis: Vec<Vec<[f64; 2]>> =
        r.best_basis.vectors().iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect();
    json!({
        "target": out.target,
        "bound": out.target.bound_id(),
        "exact": out.exact,
        "optimizer": out.config,
        "best_value": number(r.best_value),
        "best_basis_columns": basis,
        "restarts_used": r.restarts_used,
        "evaluations": r.evaluations,
        "converged": r.converged,
        "trace": r.trace.iter().map(|&(i, v)| json!({ "restart": i, "value": number(v) })).collect::<Vec<_>>(),
        "metadata": { "version": env!("CARGO_PKG_VERSION") },
    })
}

pub fn render(report: Report<'_>, format: Format) -> Result<String, HarnessError> {
    match (report, format) {
        (Report::Compute(r), Format::Csv) => compute_csv(r),
        (Report::Compute(r), Format::Json) => pretty(&compute_json(r)),
        (Report::Optimize(o), Format::Csv) => optimize_csv(o),
        (Report::Optimize(o), Format::Json) => pretty(&optimize_json(o)),
        (Report::Sweep(t), Format::Csv) => sweep_csv(t),
        (Report::Verification(r), Format::Csv) => verification_csv(r),
        (Report::Sweep(t), Format::Json) => pretty(&sweep_json(t)),
        (Report::Verification(r), Format::Json) => pretty(&verification_json(r)),
    }
}

/// Pretty JSON with a trailing newline. Object keys come out sorted.
pub fn pretty(v: &Value) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| HarnessError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `report` to `path`, creating parent directories.
pub fn emit(report: Report<'_>, format: Format, path: &Path) -> Result<(), HarnessError> {
    let text = render(report, format)?;
    let io = |source| HarnessError::Io { path: path.to_owned(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}
