//! Uniform result type emitted by every solver.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::embedding::EmbeddingKD;
use crate::scalar::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Exact,
    Interval { lo: f64, hi: f64 },
    Approx { eps: f64 },
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Exact => "exact",
            Status::Interval { .. } => "interval",
            Status::Approx { .. } => "approx",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    None,
    Valuation(Vec<f64>),
    Embedding(EmbeddingKD),
    VertexSet(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub value: f64,
    /// Exact value when the solver ran in rational mode.
    pub exact: Option<Rational>,
    pub witness: Witness,
    pub status: Status,
    pub diagnostics: BTreeMap<String, Value>,
}

impl SolveReport {
    pub fn new(value: f64, witness: Witness, status: Status) -> Self {
        if let Status::Interval { lo, hi } = status {
            debug_assert!(lo <= hi, "interval status requires lo <= hi");
        }
        if let Status::Approx { eps } = status {
            debug_assert!(eps > 0.0, "approx status requires eps > 0");
        }
        SolveReport { value, exact: None, witness, status, diagnostics: BTreeMap::new() }
    }

    pub fn exact(value: Rational, witness: Witness) -> Self {
        let mut r = SolveReport::new(crate::scalar::rational_to_f64(&value), witness, Status::Exact);
        r.exact = Some(value);
        r
    }

    pub fn with_exact(mut self, value: Option<Rational>) -> Self {
        if let Some(v) = &value {
            self.value = crate::scalar::rational_to_f64(v);
        }
        self.exact = value;
        self
    }

    pub fn diag(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }

    pub fn valuation(&self) -> Option<&[f64]> {
        match &self.witness {
            Witness::Valuation(x) => Some(x),
            _ => None,
        }
    }

    pub fn vertex_set(&self) -> Option<&[usize]> {
        match &self.witness {
            Witness::VertexSet(s) => Some(s),
            _ => None,
        }
    }

    /// JSON object; keys come out sorted, so output is deterministic.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("value".into(), json_number(self.value));
        if let Some(q) = &self.exact {
            obj.insert("value_exact".into(), Value::String(format_rational(q)));
        }
        obj.insert("status".into(), Value::String(self.status.name().into()));
        match self.status {
            Status::Interval { lo, hi } => {
                obj.insert("lo".into(), json_number(lo));
                obj.insert("hi".into(), json_number(hi));
            }
            Status::Approx { eps } => {
                obj.insert("eps".into(), json_number(eps));
            }
            Status::Exact => {}
        }
        let witness = match &self.witness {
            Witness::None => Value::Null,
            Witness::Valuation(x) => json!(x),
            Witness::Embedding(e) => json!(e.y),
            Witness::VertexSet(s) => json!(s),
        };
        obj.insert("witness".into(), witness);
        if !self.diagnostics.is_empty() {
            obj.insert("diagnostics".into(), Value::Object(self.diagnostics.clone().into_iter().collect()));
        }
        Value::Object(obj)
    }
}

/// `f64` as a JSON number, `null` when not finite.
pub fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn json_rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}
