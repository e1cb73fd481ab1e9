//! Catalog element types: models, entities, relations, attributes and
//! constraints, with the field names used by the catalog file.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::metalang::Comparator;
use crate::value::Value;

/// A registered data source together with the structure discovered in it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Model {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Source type tag.
    #[serde(default)]
    pub meta_model_name: String,
    /// Source location.
    #[serde(default)]
    pub file_name: String,
    /// Id of the source descriptor this model reads from; empty when unbound.
    #[serde(default)]
    pub connection: String,
    #[serde(default)]
    pub linked_models: Vec<String>,
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Model {
        Model { name: name.into(), ..Model::default() }
    }

    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.name == name)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Entity {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub entity_type: String,
    /// Display pictogram tag.
    #[serde(default)]
    pub draw_type: String,
    #[serde(default)]
    pub attributes: Vec<Attribute>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    /// Opaque.
    #[serde(default)]
    pub operations: Vec<String>,
    /// Opaque.
    #[serde(default)]
    pub values: Vec<String>,
}

impl Entity {
    pub fn new(name: impl Into<String>) -> Entity {
        Entity { name: name.into(), ..Entity::default() }
    }

    pub fn with_attribute(mut self, attribute: Attribute) -> Entity {
        self.attributes.push(attribute);
        self
    }

    pub fn with_constraint(mut self, constraint: Constraint) -> Entity {
        self.constraints.push(constraint);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// One violation per constraint that does not hold on `row`. A missing or
    /// null value violates every constraint on its attribute.
    pub fn check_constraints(&self, row: &BTreeMap<String, Value>) -> Vec<Violation> {
        self.constraints
            .iter()
            .filter(|c| !row.get(&c.attribute_name).is_some_and(|v| c.holds(v)))
            .map(|c| Violation { attribute_name: c.attribute_name.clone(), error_message: c.error_message.clone() })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub attribute_name: String,
    pub error_message: String,
}

/// Attribute domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributeType {
    Number,
    Text,
    /// Values are keys of the named entity.
    Reference(String),
}

impl AttributeType {
    pub fn admits(&self, value: &Value) -> bool {
        matches!(
            (self, value),
            (AttributeType::Number, Value::Number(_))
                | (AttributeType::Text | AttributeType::Reference(_), Value::Text(_))
        )
    }
}

impl fmt::Display for AttributeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeType::Number => f.write_str("number"),
            AttributeType::Text => f.write_str("text"),
            AttributeType::Reference(target) => write!(f, "reference({target})"),
        }
    }
}

impl FromStr for AttributeType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "number" => Ok(AttributeType::Number),
            "text" => Ok(AttributeType::Text),
            _ => s
                .strip_prefix("reference(")
                .and_then(|rest| rest.strip_suffix(')'))
                .filter(|target| !target.is_empty())
                .map(|target| AttributeType::Reference(target.to_string()))
                .ok_or_else(|| format!("unknown attribute type `{s}`")),
        }
    }
}

impl Serialize for AttributeType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AttributeType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attribute {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(rename = "type")]
    pub ty: AttributeType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Value>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, ty: AttributeType) -> Attribute {
        Attribute { name: name.into(), description: String::new(), ty, default: None }
    }
}

/// `attributeName sign value`, e.g. `amount >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Constraint {
    pub attribute_name: String,
    pub sign: Comparator,
    pub value: Value,
    #[serde(default)]
    pub error_message: String,
}

impl Constraint {
    pub fn new(attribute: impl Into<String>, sign: Comparator, value: Value, message: impl Into<String>) -> Constraint {
        Constraint { attribute_name: attribute.into(), sign, value, error_message: message.into() }
    }

    /// Whether `cell sign value` is true. Nulls and type mismatches never hold.
    pub fn holds(&self, cell: &Value) -> bool {
        match (cell, &self.value) {
            (Value::Number(a), Value::Number(b)) => self.sign.holds(a.total_cmp(b)),
            (Value::Text(a), Value::Text(b)) => self.sign.holds(a.cmp(b)),
            _ => false,
        }
    }

    pub(crate) fn sort_key(&self) -> (&str, Comparator, &Value, &str) {
        (&self.attribute_name, self.sign, &self.value, &self.error_message)
    }
}

/// Relation cardinality bound; `Unbounded` is written `"N"` and compares
/// greater than every count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cardinality {
    Count(u64),
    Unbounded,
}

impl Default for Cardinality {
    fn default() -> Self {
        Cardinality::Count(0)
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Count(n) => write!(f, "{n}"),
            Cardinality::Unbounded => f.write_str("N"),
        }
    }
}

impl Serialize for Cardinality {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cardinality::Count(n) => serializer.serialize_u64(*n),
            Cardinality::Unbounded => serializer.serialize_str("N"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinality {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Count(n) => Ok(Cardinality::Count(n)),
            Raw::Text(s) if s == "N" => Ok(Cardinality::Unbounded),
            Raw::Text(s) => {
                Err(serde::de::Error::custom(format!("cardinality must be a non-negative integer or \"N\", got {s:?}")))
            }
        }
    }
}

fn unbounded() -> Cardinality {
    Cardinality::Unbounded
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Relation {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Free text.
    #[serde(rename = "type", default)]
    pub kind: String,
    pub start_entity: String,
    pub end_entity: String,
    #[serde(default)]
    pub start_min: Cardinality,
    #[serde(default = "unbounded")]
    pub start_max: Cardinality,
    #[serde(default)]
    pub end_min: Cardinality,
    #[serde(default = "unbounded")]
    pub end_max: Cardinality,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
}

impl Relation {
    /// A relation with cardinality `0..N` at both ends.
    pub fn new(name: impl Into<String>, start: impl Into<String>, end: impl Into<String>) -> Relation {
        Relation {
            name: name.into(),
            description: String::new(),
            kind: String::new(),
            start_entity: start.into(),
            end_entity: end.into(),
            start_min: Cardinality::Count(0),
            start_max: Cardinality::Unbounded,
            end_min: Cardinality::Count(0),
            end_max: Cardinality::Unbounded,
            constraints: Vec::new(),
        }
    }

    pub fn touches(&self, entity: &str) -> bool {
        self.start_entity == entity || self.end_entity == entity
    }
}
