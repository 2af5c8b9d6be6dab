//! CSV and JSON encoding shared by the commands.
//!
//! Numbers use Rust's shortest round-trip formatting, so parsing a field back
//! gives the same `f64`. Complex entries become `[re, im]` pairs in JSON and
//! `<name>_re`, `<name>_im` column pairs in CSV.

use jacobi_scatter::{CMat, C64};
use serde_json::{json, Value};

use crate::CliError;

pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Column names `{prefix}_{i}_{j}_re`, `{prefix}_{i}_{j}_im` in row-major order.
pub fn matrix_header(prefix: &str, n: usize) -> Vec<String> {
    (0..n).flat_map(|i| (0..n).flat_map(move |j| ["re", "im"].map(|part| format!("{prefix}_{i}_{j}_{part}")))).collect()
}

pub fn matrix_fields(m: &CMat) -> Vec<String> {
    (0..m.rows()).flat_map(|i| (0..m.cols()).flat_map(move |j| [num(m[(i, j)].re), num(m[(i, j)].im)])).collect()
}

/// Placeholder fields for a row whose matrix could not be computed.
pub fn missing_fields(n: usize) -> Vec<String> {
    vec![num(f64::NAN); 2 * n * n]
}

pub fn complex_fields(z: C64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn json_complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn json_matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| json_complex(m[(i, j)])).collect())).collect(),
    )
}

/// JSON number, or `null` when `x` is not finite.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built from finite numbers and strings");
    s.push('\n');
    s
}
