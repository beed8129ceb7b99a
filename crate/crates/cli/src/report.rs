//! JSON-lines report assembly. Every command appends one object per check
//! and the whole report is rendered in one pass, so identical jobs produce
//! byte-identical output.

use serde_json::{json, Value};

/// A single check line: what ran, with which parameters, and how it ended.
pub struct Line {
    pub check: &'static str,
    pub params: Value,
    pub verdict: String,
    pub data: Value,
    pub witness: Option<Value>,
}

pub struct Report {
    lines: Vec<Line>,
    negative: bool,
}

impl Report {
    pub fn new(command: &str, resolved_spec: Value) -> Report {
        let head = Line {
            check: "spec",
            params: json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
            }),
            verdict: "resolved".into(),
            data: resolved_spec,
            witness: None,
        };
        Report {
            lines: vec![head],
            negative: false,
        }
    }

    /// Record a check; `positive` decides whether the report stays clean.
    pub fn push(
        &mut self,
        check: &'static str,
        params: Value,
        verdict: impl Into<String>,
        data: Value,
        witness: Option<Value>,
        positive: bool,
    ) {
        if !positive {
            self.negative = true;
        }
        self.lines.push(Line {
            check,
            params,
            verdict: verdict.into(),
            data,
            witness,
        });
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let mut object = serde_json::Map::new();
            object.insert("check".into(), json!(line.check));
            object.insert("params".into(), line.params.clone());
            object.insert("verdict".into(), json!(line.verdict));
            object.insert("data".into(), line.data.clone());
            if let Some(witness) = &line.witness {
                object.insert("witness".into(), witness.clone());
            }
            out.push_str(&Value::Object(object).to_string());
            out.push('\n');
        }
        out
    }
}
