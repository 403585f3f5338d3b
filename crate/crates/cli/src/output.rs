use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

/// A command result in all three encodings.
pub struct Report {
    pub json: Value,
    csv: Option<String>,
    text: String,
}

impl Report {
    pub fn new<T: Serialize>(value: &T, text: String) -> anyhow::Result<Report> {
        Ok(Report {
            json: serde_json::to_value(value)?,
            csv: None,
            text,
        })
    }

    /// Use a fixed-header table instead of the generic `key,value` flattening.
    pub fn with_csv(mut self, csv: String) -> Report {
        self.csv = Some(csv);
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Csv => match &self.csv {
                Some(c) => c.clone(),
                None => flatten_csv(&self.json),
            },
            Format::Text => self.text.clone(),
        })
    }
}

/// `key,value` rows with dotted paths for nested objects and arrays.
pub fn flatten_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    let mut rows = Vec::new();
    flatten(v, String::new(), &mut rows);
    for (k, v) in rows {
        out.push_str(&csv_field(&k));
        out.push(',');
        out.push_str(&csv_field(&v));
        out.push('\n');
    }
    out
}

fn flatten(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(v, join(k), rows)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(v, join(&i.to_string()), rows)),
        Value::String(s) => rows.push((path, s.clone())),
        Value::Null => rows.push((path, String::new())),
        other => rows.push((path, other.to_string())),
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip decimal form of a float, as JSON writes it.
pub fn num(x: f64) -> String {
    serde_json::Value::from(x).to_string()
}
