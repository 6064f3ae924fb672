//! Context parameter spaces.
//!
//! A [`ContextSchema`] declares every parameter a game accepts: its kind,
//! default, hard bounds, and category. Users hand in a partial
//! [`ContextSpec`]; [`ContextSchema::validate`] checks it,
//! [`ContextSchema::resolve`] merges it with the defaults into a total
//! [`ResolvedContext`], and [`realize`] samples one value per range pair
//! for an episode, producing the [`EpisodeContext`] that environments
//! report back through `get_context`.
//!
//! Range pairs follow a naming convention: `min_X`/`max_X` or
//! `X_min`/`X_max`. The realized value is recorded under the base name `X`.
//! Integer pairs realize uniformly over the closed interval `[lo, hi]`
//! (odd values only for odd-constrained pairs); float pairs realize
//! uniformly over the half-open interval `[lo, hi)`.

mod format;
mod presets;
mod schemas;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::games::GameId;
use crate::rng::RngStream;

pub use format::{from_json_object, parse_context, serialize_context, to_json_object, ContextParseError};
pub use presets::{preset, PresetMode};
pub use schemas::schema_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Int,
    Float,
    Bool,
    Enum,
}

impl ParamKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::Float => "float",
            ParamKind::Bool => "bool",
            ParamKind::Enum => "enum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    GameMechanics,
    RewardStructure,
    AgentAttribute,
    MapComplexity,
    GameSpecific,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::GameMechanics,
        Category::RewardStructure,
        Category::AgentAttribute,
        Category::MapComplexity,
        Category::GameSpecific,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::GameMechanics => "game_mechanics",
            Category::RewardStructure => "reward_structure",
            Category::AgentAttribute => "agent_attribute",
            Category::MapComplexity => "map_complexity",
            Category::GameSpecific => "game_specific",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeRole {
    None,
    MinOf(&'static str),
    MaxOf(&'static str),
}

/// Which direction of a numeric parameter makes a level harder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Harder {
    Neutral,
    WhenHigher,
    WhenLower,
}

/// A typed parameter value after validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Enum(&'static str),
}

impl ParamValue {
    pub fn as_i64(self) -> i64 {
        match self {
            ParamValue::Int(v) => v,
            ParamValue::Float(v) => v as i64,
            ParamValue::Bool(b) => b as i64,
            ParamValue::Enum(_) => panic!("enum value used as an integer"),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ParamValue::Int(v) => v as f64,
            ParamValue::Float(v) => v,
            ParamValue::Bool(b) => b as i64 as f64,
            ParamValue::Enum(_) => panic!("enum value used as a number"),
        }
    }

    pub fn as_bool(self) -> bool {
        match self {
            ParamValue::Bool(b) => b,
            other => panic!("{other:?} used as a bool"),
        }
    }

    pub fn as_enum(self) -> &'static str {
        match self {
            ParamValue::Enum(s) => s,
            other => panic!("{other:?} used as an enum"),
        }
    }

    pub fn to_spec_value(self) -> SpecValue {
        match self {
            ParamValue::Int(v) => SpecValue::Int(v),
            ParamValue::Float(v) => SpecValue::Float(v),
            ParamValue::Bool(v) => SpecValue::Bool(v),
            ParamValue::Enum(s) => SpecValue::Str(s.to_string()),
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            ParamValue::Int(v) => json!(v),
            ParamValue::Float(v) => json!(v),
            ParamValue::Bool(v) => json!(v),
            ParamValue::Enum(s) => json!(s),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Bool(v) => write!(f, "{v}"),
            ParamValue::Enum(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParamDef {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
    /// Inclusive bounds for numeric kinds.
    pub bounds: Option<(f64, f64)>,
    pub enum_values: &'static [&'static str],
    pub category: Category,
    pub range_role: RangeRole,
    /// Only odd integers are accepted.
    pub odd_only: bool,
    pub harder: Harder,
    pub description: &'static str,
}

impl ParamDef {
    pub fn to_json(&self) -> Value {
        let bound = |v: f64| match self.kind {
            ParamKind::Int => json!(v as i64),
            _ => json!(v),
        };
        let (hard_min, hard_max) = match self.bounds {
            Some((lo, hi)) => (bound(lo), bound(hi)),
            None => (Value::Null, Value::Null),
        };
        let range_role = match self.range_role {
            RangeRole::None => Value::Null,
            RangeRole::MinOf(p) => json!({ "role": "range_min_of", "partner": p }),
            RangeRole::MaxOf(p) => json!({ "role": "range_max_of", "partner": p }),
        };
        json!({
            "name": self.name,
            "kind": self.kind.as_str(),
            "default": self.default.to_json(),
            "hard_min": hard_min,
            "hard_max": hard_max,
            "enum_values": self.enum_values,
            "category": self.category.as_str(),
            "range_role": range_role,
            "odd_only": self.odd_only,
            "description": self.description,
        })
    }

    pub fn bounds_text(&self) -> String {
        match (self.kind, self.bounds) {
            (ParamKind::Int, Some((lo, hi))) => format!("[{}, {}]", lo as i64, hi as i64),
            (ParamKind::Float, Some((lo, hi))) => format!("[{lo}, {hi}]"),
            (ParamKind::Enum, _) => format!("{{{}}}", self.enum_values.join(", ")),
            _ => "-".to_string(),
        }
    }
}

/// A min/max pair sampled once per episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangePair {
    pub base: &'static str,
    pub lo: usize,
    pub hi: usize,
}

pub type CrossCheck = fn(&ContextSchema, &[ParamValue]) -> Vec<ValidationError>;

#[derive(Debug)]
pub struct ContextSchema {
    pub game_id: GameId,
    pub schema_version: u32,
    pub params: Vec<ParamDef>,
    range_pairs: Vec<RangePair>,
    cross_check: CrossCheck,
}

fn base_name(name: &'static str) -> Option<&'static str> {
    name.strip_prefix("min_")
        .or_else(|| name.strip_prefix("max_"))
        .or_else(|| name.strip_suffix("_min"))
        .or_else(|| name.strip_suffix("_max"))
}

impl ContextSchema {
    /// Builds a schema, panicking if the parameter table breaks an invariant.
    pub(crate) fn new(game_id: GameId, schema_version: u32, params: Vec<ParamDef>, cross_check: CrossCheck) -> Self {
        let mut range_pairs = Vec::new();
        for (i, p) in params.iter().enumerate() {
            assert!(
                params.iter().filter(|q| q.name == p.name).count() == 1,
                "duplicate parameter {}",
                p.name
            );
            match (p.kind, p.bounds) {
                (ParamKind::Int | ParamKind::Float, Some((lo, hi))) => {
                    let d = p.default.as_f64();
                    assert!(lo <= d && d <= hi, "{}: default outside bounds", p.name);
                }
                (ParamKind::Int | ParamKind::Float, None) => panic!("{}: missing bounds", p.name),
                (ParamKind::Enum, _) => {
                    assert!(p.enum_values.contains(&p.default.as_enum()), "{}: bad default", p.name)
                }
                (ParamKind::Bool, _) => {}
            }
            if p.odd_only {
                let (lo, hi) = p.bounds.unwrap();
                assert!(p.kind == ParamKind::Int, "{}: odd_only needs int", p.name);
                for v in [lo as i64, hi as i64, p.default.as_i64()] {
                    assert!(v % 2 != 0, "{}: odd_only with even bound/default", p.name);
                }
            }
            if let RangeRole::MinOf(partner) = p.range_role {
                let j = params
                    .iter()
                    .position(|q| q.name == partner)
                    .unwrap_or_else(|| panic!("{}: missing partner {partner}", p.name));
                let q = &params[j];
                assert_eq!(q.range_role, RangeRole::MaxOf(p.name), "{}: asymmetric pair", p.name);
                assert_eq!(p.kind, q.kind, "{}: partner kind differs", p.name);
                assert_eq!(p.bounds, q.bounds, "{}: partner bounds differ", p.name);
                assert_eq!(p.odd_only, q.odd_only, "{}: partner parity differs", p.name);
                let base = base_name(p.name).expect("range pair naming convention");
                assert_eq!(Some(base), base_name(q.name), "{}: base names differ", p.name);
                assert!(p.default.as_f64() <= q.default.as_f64());
                range_pairs.push(RangePair { base, lo: i, hi: j });
            }
            if let RangeRole::MaxOf(partner) = p.range_role {
                assert!(
                    params
                        .iter()
                        .any(|q| q.name == partner && q.range_role == RangeRole::MinOf(p.name)),
                    "{}: asymmetric pair",
                    p.name
                );
            }
        }
        Self {
            game_id,
            schema_version,
            params,
            range_pairs,
            cross_check,
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn param(&self, name: &str) -> Option<&ParamDef> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn range_pairs(&self) -> &[RangePair] {
        &self.range_pairs
    }

    pub fn defaults(&self) -> ResolvedContext {
        ResolvedContext {
            game: self.game_id,
            schema_version: self.schema_version,
            values: self.params.iter().map(|p| p.default).collect(),
        }
    }

    /// A random candidate spec for fuzzing. Each parameter is overridden
    /// with probability `p_override` by a value within its hard bounds;
    /// range pairs stay ordered and odd-only values stay odd, but the
    /// game's cross-check may still reject the result.
    pub fn random_spec(&self, stream: &mut RngStream, p_override: f64) -> ContextSpec {
        let mut drawn: Vec<Option<ParamValue>> = self
            .params
            .iter()
            .map(|p| {
                if !stream.chance(p_override) {
                    return None;
                }
                Some(match (p.kind, p.bounds) {
                    (ParamKind::Int, Some((lo, hi))) => {
                        let mut v = stream.uniform_int(lo as i64, hi as i64);
                        if p.odd_only && v % 2 == 0 {
                            v += if v < hi as i64 { 1 } else { -1 };
                        }
                        ParamValue::Int(v)
                    }
                    (ParamKind::Float, Some((lo, hi))) => ParamValue::Float(stream.uniform_f64(lo, hi)),
                    (ParamKind::Enum, _) => ParamValue::Enum(p.enum_values[stream.index(p.enum_values.len())]),
                    _ => ParamValue::Bool(stream.chance(0.5)),
                })
            })
            .collect();
        for pair in &self.range_pairs {
            let lo = drawn[pair.lo].unwrap_or(self.params[pair.lo].default);
            let hi = drawn[pair.hi].unwrap_or(self.params[pair.hi].default);
            if lo.as_f64() > hi.as_f64() {
                drawn[pair.lo] = Some(hi);
                drawn[pair.hi] = Some(lo);
            }
        }
        self.params
            .iter()
            .zip(drawn)
            .filter_map(|(p, v)| v.map(|v| (p.name, v.to_spec_value())))
            .collect()
    }

    /// Draws candidates from [`random_spec`](Self::random_spec) until one
    /// validates, giving up after `max_tries`.
    pub fn random_valid_spec(&self, stream: &mut RngStream, p_override: f64, max_tries: usize) -> Option<ContextSpec> {
        (0..max_tries)
            .map(|_| self.random_spec(stream, p_override))
            .find(|s| self.validate(s).is_ok())
    }

    /// Checks `spec` against this schema, reporting every problem found.
    pub fn validate(&self, spec: &ContextSpec) -> Result<(), ValidationErrors> {
        self.resolve(spec).map(|_| ())
    }

    /// Defaults overridden by `spec`.
    pub fn resolve(&self, spec: &ContextSpec) -> Result<ResolvedContext, ValidationErrors> {
        let mut values: Vec<ParamValue> = self.params.iter().map(|p| p.default).collect();
        let mut given = vec![false; self.params.len()];
        let mut bad = vec![false; self.params.len()];
        let mut errors = Vec::new();
        for (name, raw) in &spec.assignments {
            let Some(i) = self.index_of(name) else {
                errors.push(ValidationError::UnknownParameter { name: name.clone() });
                continue;
            };
            match coerce(&self.params[i], raw) {
                Ok(v) => {
                    values[i] = v;
                    given[i] = true;
                }
                Err(e) => {
                    bad[i] = true;
                    errors.push(e);
                }
            }
        }
        for pair in &self.range_pairs {
            if (given[pair.lo] || given[pair.hi])
                && !(bad[pair.lo] || bad[pair.hi])
                && values[pair.lo].as_f64() > values[pair.hi].as_f64()
            {
                errors.push(ValidationError::InvertedRange {
                    lo_name: self.params[pair.lo].name.to_string(),
                    hi_name: self.params[pair.hi].name.to_string(),
                });
            }
        }
        if errors.is_empty() {
            errors = (self.cross_check)(self, &values);
        }
        if errors.is_empty() {
            Ok(ResolvedContext {
                game: self.game_id,
                schema_version: self.schema_version,
                values,
            })
        } else {
            Err(ValidationErrors(errors))
        }
    }
}

fn coerce(def: &ParamDef, raw: &SpecValue) -> Result<ParamValue, ValidationError> {
    let mismatch = || ValidationError::TypeMismatch {
        name: def.name.to_string(),
        expected: def.kind.as_str(),
        found: raw.type_name(),
    };
    let value = match (def.kind, raw) {
        (ParamKind::Int, SpecValue::Int(v)) => ParamValue::Int(*v),
        (ParamKind::Int, SpecValue::Float(f)) => {
            if f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15 {
                ParamValue::Int(*f as i64)
            } else {
                return Err(mismatch());
            }
        }
        (ParamKind::Float, SpecValue::Int(v)) => ParamValue::Float(*v as f64),
        (ParamKind::Float, SpecValue::Float(f)) => {
            if !f.is_finite() {
                return Err(mismatch());
            }
            ParamValue::Float(*f)
        }
        (ParamKind::Bool, SpecValue::Bool(b)) => ParamValue::Bool(*b),
        (ParamKind::Enum, SpecValue::Str(s)) => match def.enum_values.iter().find(|v| **v == s) {
            Some(v) => ParamValue::Enum(v),
            None => {
                return Err(ValidationError::UnknownVariant {
                    name: def.name.to_string(),
                    value: s.clone(),
                    allowed: def.enum_values.join(", "),
                })
            }
        },
        _ => return Err(mismatch()),
    };
    if let Some((lo, hi)) = def.bounds {
        let v = value.as_f64();
        if v < lo || v > hi {
            return Err(ValidationError::OutOfBounds {
                name: def.name.to_string(),
                value: v,
                lo,
                hi,
            });
        }
    }
    if def.odd_only && value.as_i64() % 2 == 0 {
        return Err(ValidationError::NotOdd {
            name: def.name.to_string(),
            value: value.as_i64(),
        });
    }
    Ok(value)
}

/// A raw, unvalidated parameter value as written by a user.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl SpecValue {
    fn type_name(&self) -> &'static str {
        match self {
            SpecValue::Int(_) => "integer",
            SpecValue::Float(_) => "number",
            SpecValue::Bool(_) => "bool",
            SpecValue::Str(_) => "string",
        }
    }
}

impl From<i64> for SpecValue {
    fn from(v: i64) -> Self {
        SpecValue::Int(v)
    }
}

impl From<i32> for SpecValue {
    fn from(v: i32) -> Self {
        SpecValue::Int(v as i64)
    }
}

impl From<f64> for SpecValue {
    fn from(v: f64) -> Self {
        SpecValue::Float(v)
    }
}

impl From<bool> for SpecValue {
    fn from(v: bool) -> Self {
        SpecValue::Bool(v)
    }
}

impl From<&str> for SpecValue {
    fn from(v: &str) -> Self {
        SpecValue::Str(v.to_string())
    }
}

/// A partial assignment of parameter values. Keys are checked against a
/// schema only when the spec is validated.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContextSpec {
    pub assignments: BTreeMap<String, SpecValue>,
}

impl ContextSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<SpecValue>) -> Self {
        self.assignments.insert(name.to_string(), value.into());
        self
    }

    pub fn set(&mut self, name: &str, value: impl Into<SpecValue>) {
        self.assignments.insert(name.to_string(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&SpecValue> {
        self.assignments.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }
}

impl<K: Into<String>, V: Into<SpecValue>> FromIterator<(K, V)> for ContextSpec {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Self {
            assignments: iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

/// Total assignment: one value per schema parameter, in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedContext {
    pub game: GameId,
    pub schema_version: u32,
    pub values: Vec<ParamValue>,
}

impl ResolvedContext {
    pub fn schema(&self) -> &'static ContextSchema {
        schema_for(self.game)
    }

    pub fn get(&self, name: &str) -> Option<ParamValue> {
        self.schema().index_of(name).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, ParamValue)> + '_ {
        self.schema().params.iter().zip(&self.values).map(|(p, v)| (p.name, *v))
    }

    /// The fully specified spec that resolves back to `self`.
    pub fn to_spec(&self) -> ContextSpec {
        self.iter().map(|(k, v)| (k, v.to_spec_value())).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realized {
    pub name: &'static str,
    pub value: ParamValue,
}

/// The context of one episode: the resolved parameters plus the values
/// sampled for each range pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeContext {
    pub resolved: ResolvedContext,
    /// One entry per range pair, in schema order.
    pub realized: Vec<Realized>,
    pub episode_index: u64,
    pub seed_used: u64,
}

impl EpisodeContext {
    pub fn realized(&self, base: &str) -> Option<ParamValue> {
        self.realized.iter().find(|r| r.name == base).map(|r| r.value)
    }

    pub fn realized_values(&self) -> Vec<ParamValue> {
        self.realized.iter().map(|r| r.value).collect()
    }

    pub fn to_json(&self) -> Value {
        let realized: serde_json::Map<String, Value> = self
            .realized
            .iter()
            .map(|r| (r.name.to_string(), r.value.to_json()))
            .collect();
        json!({
            "episode_index": self.episode_index,
            "realized": realized,
            "resolved": self.resolved.to_json(),
            "seed_used": self.seed_used,
        })
    }
}

/// Samples one value per range pair of `schema` from `values`, in schema
/// order. Shared by the tracked and the static-baseline reset paths.
pub fn realize_values(schema: &ContextSchema, values: &[ParamValue], stream: &mut RngStream) -> Vec<ParamValue> {
    schema
        .range_pairs
        .iter()
        .map(|pair| {
            let def = &schema.params[pair.lo];
            match def.kind {
                ParamKind::Int => {
                    let lo = values[pair.lo].as_i64();
                    let hi = values[pair.hi].as_i64();
                    if def.odd_only {
                        ParamValue::Int(lo + 2 * stream.uniform_int(0, (hi - lo) / 2))
                    } else {
                        ParamValue::Int(stream.uniform_int(lo, hi))
                    }
                }
                ParamKind::Float => {
                    ParamValue::Float(stream.uniform_f64(values[pair.lo].as_f64(), values[pair.hi].as_f64()))
                }
                kind => unreachable!("range pair over {kind:?}"),
            }
        })
        .collect()
}

/// Per-episode context: draws every range pair from `stream`.
pub fn realize(
    schema: &ContextSchema,
    resolved: &ResolvedContext,
    stream: &mut RngStream,
    episode_index: u64,
) -> EpisodeContext {
    let seed_used = stream.state();
    let values = realize_values(schema, &resolved.values, stream);
    let realized = schema
        .range_pairs
        .iter()
        .zip(values)
        .map(|(pair, value)| Realized { name: pair.base, value })
        .collect();
    EpisodeContext {
        resolved: resolved.clone(),
        realized,
        episode_index,
        seed_used,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{name}: unknown parameter")]
    UnknownParameter { name: String },
    #[error("{name}: expected {expected}, found {found}")]
    TypeMismatch {
        name: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("{name}: value {value} outside bounds [{lo}, {hi}]")]
    OutOfBounds { name: String, value: f64, lo: f64, hi: f64 },
    #[error("{lo_name}/{hi_name}: inverted range ({lo_name} exceeds {hi_name})")]
    InvertedRange { lo_name: String, hi_name: String },
    #[error("{name}: value {value} must be odd")]
    NotOdd { name: String, value: i64 },
    #[error("{name}: `{value}` is not one of {{{allowed}}}")]
    UnknownVariant {
        name: String,
        value: String,
        allowed: String,
    },
    #[error("{name}: {reason}")]
    Infeasible { name: String, reason: String },
}

impl ValidationError {
    /// Parameter names this error refers to.
    pub fn names(&self) -> Vec<&str> {
        match self {
            ValidationError::InvertedRange { lo_name, hi_name } => vec![lo_name, hi_name],
            ValidationError::UnknownParameter { name }
            | ValidationError::TypeMismatch { name, .. }
            | ValidationError::OutOfBounds { name, .. }
            | ValidationError::NotOdd { name, .. }
            | ValidationError::UnknownVariant { name, .. }
            | ValidationError::Infeasible { name, .. } => vec![name],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl ValidationErrors {
    pub fn iter(&self) -> std::slice::Iter<'_, ValidationError> {
        self.0.iter()
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}
