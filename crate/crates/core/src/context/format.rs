//! Context files: one flat JSON object mapping parameter names to numbers,
//! booleans, or enum identifier strings.
//!
//! Serialization is canonical: keys in lexicographic order, two-space
//! indentation, one key per line, and a trailing newline. An empty spec
//! serializes to `{}` followed by a newline.

use serde_json::{Map, Number, Value};
use thiserror::Error;

use super::{ContextSpec, SpecValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContextParseError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("parse error: expected a JSON object at top level, found {found}")]
    NotAnObject { found: &'static str },
    #[error("{key}: nested value ({found}) not allowed in a flat context")]
    NestedValue { key: String, found: &'static str },
    #[error("{key}: null is not a valid parameter value")]
    NullValue { key: String },
}

fn json_type(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "bool",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

pub fn parse_context(text: &str) -> Result<ContextSpec, ContextParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ContextParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = value else {
        return Err(ContextParseError::NotAnObject {
            found: json_type(&value),
        });
    };
    from_json_object(&map)
}

/// Converts an already-parsed JSON object into a spec, with the same rules
/// as [`parse_context`].
pub fn from_json_object(map: &Map<String, Value>) -> Result<ContextSpec, ContextParseError> {
    let mut spec = ContextSpec::new();
    for (key, v) in map {
        let sv = match v {
            Value::Bool(b) => SpecValue::Bool(*b),
            Value::Number(n) => number_value(n),
            Value::String(s) => SpecValue::Str(s.clone()),
            Value::Null => return Err(ContextParseError::NullValue { key: key.clone() }),
            Value::Array(_) | Value::Object(_) => {
                return Err(ContextParseError::NestedValue {
                    key: key.clone(),
                    found: json_type(v),
                })
            }
        };
        spec.assignments.insert(key.clone(), sv);
    }
    Ok(spec)
}

fn number_value(n: &Number) -> SpecValue {
    match n.as_i64() {
        Some(i) => SpecValue::Int(i),
        None => SpecValue::Float(n.as_f64().unwrap_or(f64::NAN)),
    }
}

pub fn to_json_object(spec: &ContextSpec) -> Map<String, Value> {
    spec.assignments
        .iter()
        .map(|(k, v)| {
            let jv = match v {
                SpecValue::Int(i) => Value::from(*i),
                SpecValue::Float(f) => Number::from_f64(*f).map_or(Value::Null, Value::Number),
                SpecValue::Bool(b) => Value::Bool(*b),
                SpecValue::Str(s) => Value::String(s.clone()),
            };
            (k.clone(), jv)
        })
        .collect()
}

pub fn serialize_context(spec: &ContextSpec) -> String {
    let mut out = serde_json::to_string_pretty(&Value::Object(to_json_object(spec)))
        .expect("serializing a JSON value cannot fail");
    out.push('\n');
    out
}
