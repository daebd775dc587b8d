//! Deterministic, line-oriented command reports.
//!
//! Every subcommand emits one primary line of space-separated `key=value`
//! tokens (values containing spaces or quotes are double-quoted), optionally
//! followed by extra rows for list-shaped results (violations, sweep entries,
//! counterexamples). With `--json` the same data is emitted as a single JSON
//! object instead; rows become an array under `"rows"`.

use std::fmt::Display;

/// Quote a value for the text rendering if it contains whitespace or quotes.
pub fn quote(value: &str) -> String {
    if !value.is_empty() && !value.chars().any(|c| c.is_whitespace() || c == '"') {
        value.to_string()
    } else {
        format!("{:?}", value)
    }
}

/// Accumulates key=value pairs plus optional named rows.
pub struct Report {
    pairs: Vec<(&'static str, String)>,
    rows: Vec<(&'static str, Vec<(&'static str, String)>)>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            pairs: vec![("command", command.to_string())],
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &'static str, value: impl Display) -> &mut Self {
        self.pairs.push((key, value.to_string()));
        self
    }

    /// Add a row of a given kind, e.g. one coherence violation.
    pub fn row(&mut self, kind: &'static str, fields: Vec<(&'static str, String)>) {
        self.rows.push((kind, fields));
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let main: Vec<String> = self
            .pairs
            .iter()
            .map(|(k, v)| format!("{k}={}", quote(v)))
            .collect();
        out.push_str(&main.join(" "));
        for (kind, fields) in &self.rows {
            out.push('\n');
            out.push_str(kind);
            for (k, v) in fields {
                out.push(' ');
                out.push_str(&format!("{k}={}", quote(v)));
            }
        }
        out
    }

    fn render_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        for (k, v) in &self.pairs {
            obj.insert((*k).to_string(), serde_json::Value::String(v.clone()));
        }
        if !self.rows.is_empty() {
            let rows: Vec<serde_json::Value> = self
                .rows
                .iter()
                .map(|(kind, fields)| {
                    let mut row = serde_json::Map::new();
                    row.insert(
                        "kind".to_string(),
                        serde_json::Value::String((*kind).to_string()),
                    );
                    for (k, v) in fields {
                        row.insert((*k).to_string(), serde_json::Value::String(v.clone()));
                    }
                    serde_json::Value::Object(row)
                })
                .collect();
            obj.insert("rows".to_string(), serde_json::Value::Array(rows));
        }
        serde_json::Value::Object(obj).to_string()
    }

    /// Print the report to stdout in the selected format.
    pub fn print(&self, json: bool) {
        if json {
            println!("{}", self.render_json());
        } else {
            println!("{}", self.render_text());
        }
    }
}

/// Re-serialize a pretty JSON document onto a single line for inline report
/// values. Falls back to the input if it is not valid JSON.
pub fn compact_json(pretty: &str) -> String {
    match serde_json::from_str::<serde_json::Value>(pretty) {
        Ok(v) => v.to_string(),
        Err(_) => pretty.to_string(),
    }
}
