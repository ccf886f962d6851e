//! Structured reports.

use serde::Serialize;
use serde_json::{json, Value};
use trirank::category::ObjectExpr;
use trirank::qrank::Element;
use trirank::{CategoryPresentation, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

/// Field order is fixed by declaration; maps inside `result` are sorted.
#[derive(Serialize, Debug)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub status: &'a str,
    pub result: Value,
    pub diagnostics: Vec<String>,
}

impl<'a> Report<'a> {
    pub fn new(command: &'a str, status: &'a str, result: Value, diagnostics: Vec<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            status,
            result,
            diagnostics,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// What a command produced.
pub enum Output {
    /// An artifact printed verbatim in every output mode.
    Raw(String),
    Report(Outcome),
}

pub struct Outcome {
    pub result: Value,
    pub human: String,
    pub diagnostics: Vec<String>,
    /// A domain check failed; exit status 1.
    pub failed: bool,
}

impl Outcome {
    pub fn ok(result: Value, human: String) -> Self {
        Outcome {
            result,
            human,
            diagnostics: Vec::new(),
            failed: false,
        }
    }
}

pub fn scalar(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

/// Object name ↦ value.
pub fn per_object(p: &CategoryPresentation, v: &[Scalar]) -> Value {
    Value::Object(
        v.iter()
            .enumerate()
            .map(|(x, c)| (p.name(x).to_string(), scalar(c)))
            .collect(),
    )
}

pub fn names(p: &CategoryPresentation, xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::String(p.name(x).to_string())).collect())
}

pub fn expr_text(p: &CategoryPresentation, x: &ObjectExpr) -> String {
    if x.summands().is_empty() {
        return "0".into();
    }
    x.summands().iter().map(|&z| p.name(z)).collect::<Vec<_>>().join("+")
}

/// `{low, coeffs, text}` with `coeffs[i]` the coefficient of `q^(low+i)`.
pub fn element(e: &Element) -> Value {
    let terms = e.terms();
    let low = terms.keys().next().copied().unwrap_or(0);
    let high = terms.keys().next_back().copied().unwrap_or(-1);
    let coeffs: Vec<Value> = (low..=high).map(|k| Value::String(e.coefficient(k).to_string())).collect();
    json!({ "low": low, "coeffs": coeffs, "text": e.to_string() })
}
