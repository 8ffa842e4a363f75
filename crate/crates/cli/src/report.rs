//! One report shape for every command, rendered as text, JSON or CSV.

use std::fmt::Write as _;

use ostrowski_core::ostrowski::VerificationRecord;
use ostrowski_core::Branch;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::json::{self, format_float};

pub const CSV_HEADER: [&str; 15] = [
    "command", "fn", "a", "b", "x", "s", "q", "tau", "branch", "psi", "lhs", "rhs", "margin", "holds", "oracle_err",
];

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Map<String, Value>,
    pub tau: Option<f64>,
    pub branch: Option<Branch>,
    pub psi: Option<f64>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub holds: Option<bool>,
    pub oracle_err: Option<f64>,
    pub timings: Timings,
    pub details: Map<String, Value>,
    /// Extra CSV rows, one per verification record (sweeps).
    #[serde(skip)]
    pub rows: Vec<VerificationRecord>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.to_string(), to_value(value));
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.details.insert(key.to_string(), to_value(value));
        self
    }

    pub fn fill_from(&mut self, r: &VerificationRecord) {
        self.tau = Some(r.tau);
        self.branch = Some(r.branch);
        self.psi = Some(r.psi);
        self.lhs = Some(r.lhs);
        self.rhs = Some(r.rhs);
        self.margin = Some(r.margin);
        self.holds = Some(r.holds);
        self.oracle_err = Some(r.oracle_err);
        self.detail("hypothesis_ok", r.hypothesis_ok);
    }

    pub fn to_json(&self) -> String {
        json::to_string(self).expect("report serialises")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        if self.rows.is_empty() {
            let p = |k: &str| param_cell(self.params.get(k));
            let id = if self.params.contains_key("dist") { p("dist") } else { p("fn") };
            w.write_record([
                self.command.clone(),
                id,
                p("a"),
                p("b"),
                p("x"),
                p("s"),
                p("q"),
                float_cell(self.tau),
                self.branch.map(|b| b.to_string()).unwrap_or_default(),
                float_cell(self.psi),
                float_cell(self.lhs),
                float_cell(self.rhs),
                float_cell(self.margin),
                self.holds.map(|h| h.to_string()).unwrap_or_default(),
                float_cell(self.oracle_err),
            ])
            .expect("in-memory write");
        }
        for r in &self.rows {
            w.write_record([
                self.command.clone(),
                r.fn_id.clone(),
                format_float(r.iv.a()),
                format_float(r.iv.b()),
                format_float(r.x),
                format_float(r.s),
                float_cell(r.variant.q()),
                format_float(r.tau),
                r.branch.to_string(),
                format_float(r.psi),
                format_float(r.lhs),
                format_float(r.rhs),
                format_float(r.margin),
                r.holds.to_string(),
                format_float(r.oracle_err),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("UTF-8")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "  {k}: {}", text_value(v));
        }
        let fields: [(&str, Option<String>); 8] = [
            ("tau", self.tau.map(text_float)),
            ("branch", self.branch.map(|b| b.to_string())),
            ("psi", self.psi.map(text_float)),
            ("lhs", self.lhs.map(text_float)),
            ("rhs", self.rhs.map(text_float)),
            ("margin", self.margin.map(text_float)),
            ("holds", self.holds.map(|v| v.to_string())),
            ("oracle_err", self.oracle_err.map(text_float)),
        ];
        for (k, v) in fields {
            if let Some(v) = v {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        for (k, v) in &self.details {
            match v {
                Value::Array(items) if items.iter().all(Value::is_object) => {
                    let _ = writeln!(out, "{k}: {} entries", items.len());
                    for item in items {
                        let _ = writeln!(out, "  - {}", text_value(item));
                    }
                }
                _ => {
                    let _ = writeln!(out, "{k}: {}", text_value(v));
                }
            }
        }
        let _ = writeln!(out, "elapsed_ms: {:.3}", self.timings.elapsed_ms);
        out
    }
}

fn text_float(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("plain data serialises")
}

fn float_cell(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn param_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Number(n)) if n.is_f64() => format_float(n.as_f64().unwrap_or(f64::NAN)),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", text_value(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_field_order() {
        let mut r = Report::new("bound");
        r.param("fn", "exp1").param("x", 0.5);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(
            keys,
            ["command", "params", "tau", "branch", "psi", "lhs", "rhs", "margin", "holds", "oracle_err", "timings", "details"]
        );
    }

    #[test]
    fn csv_single_row() {
        let mut r = Report::new("bound");
        r.param("fn", "exp1").param("a", 0.0).param("b", 1.0).param("x", 0.5).param("s", 1.0);
        r.rhs = Some(0.25);
        r.holds = Some(true);
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "bound,exp1,0.0000000000000000e0,1.0000000000000000e0,5.0000000000000000e-1,1.0000000000000000e0,,,,,,2.5000000000000000e-1,,true,"
        );
        assert!(lines.next().is_none());
    }
}
