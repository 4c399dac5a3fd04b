//! Report envelope, key casing and CSV tables.

use serde::Serialize;
use serde_json::{Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What every command prints.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub command: Value,
    pub version: &'static str,
    /// Seconds.
    pub wall_time: f64,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn to_json(&self) -> String {
        let v = camel_keys(serde_json::to_value(self).expect("envelopes serialize"));
        let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
        s.push('\n');
        s
    }
}

fn camel(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    let mut up = false;
    for c in key.chars() {
        if c == '_' {
            up = true;
        } else if up {
            out.extend(c.to_uppercase());
            up = false;
        } else {
            out.push(c);
        }
    }
    out
}

/// Rewrites every object key from `snake_case` to `camelCase`.
pub fn camel_keys(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (camel(&k), camel_keys(v))).collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(camel_keys).collect()),
        other => other,
    }
}

/// One row of the plot-ready table: zeros (`series = "zero"`, `n` the
/// degree) and `sigma_max` of sections (`series = "sigma"`, `n = N'`).
#[derive(Debug, Clone, Serialize)]
pub struct PlotRow {
    pub series: &'static str,
    pub n: usize,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub value: Option<f64>,
}

pub fn csv_table(rows: &[PlotRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
