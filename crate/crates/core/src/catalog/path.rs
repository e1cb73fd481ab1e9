use std::fmt;

use serde::{Deserialize, Serialize};

use crate::metalang::Comparator;

/// Address of a catalog element. Constraints have no name of their own and
/// are identified by `(attribute, sign)` within their owner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum ElementPath {
    Model { model: String },
    Entity { model: String, entity: String },
    Attribute { model: String, entity: String, attribute: String },
    Relation { model: String, relation: String },
    EntityConstraint { model: String, entity: String, attribute: String, sign: Comparator },
    RelationConstraint { model: String, relation: String, attribute: String, sign: Comparator },
}

impl ElementPath {
    pub fn model(model: &str) -> ElementPath {
        ElementPath::Model { model: model.into() }
    }

    pub fn entity(model: &str, entity: &str) -> ElementPath {
        ElementPath::Entity { model: model.into(), entity: entity.into() }
    }

    pub fn attribute(model: &str, entity: &str, attribute: &str) -> ElementPath {
        ElementPath::Attribute { model: model.into(), entity: entity.into(), attribute: attribute.into() }
    }

    pub fn relation(model: &str, relation: &str) -> ElementPath {
        ElementPath::Relation { model: model.into(), relation: relation.into() }
    }

    pub fn model_name(&self) -> &str {
        match self {
            ElementPath::Model { model }
            | ElementPath::Entity { model, .. }
            | ElementPath::Attribute { model, .. }
            | ElementPath::Relation { model, .. }
            | ElementPath::EntityConstraint { model, .. }
            | ElementPath::RelationConstraint { model, .. } => model,
        }
    }
}

impl fmt::Display for ElementPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementPath::Model { model } => write!(f, "model {model}"),
            ElementPath::Entity { model, entity } => write!(f, "entity {model}/{entity}"),
            ElementPath::Attribute { model, entity, attribute } => {
                write!(f, "attribute {model}/{entity}.{attribute}")
            }
            ElementPath::Relation { model, relation } => write!(f, "relation {model}/{relation}"),
            ElementPath::EntityConstraint { model, entity, attribute, sign } => {
                write!(f, "constraint {model}/{entity}: {attribute} {sign}")
            }
            ElementPath::RelationConstraint { model, relation, attribute, sign } => {
                write!(f, "constraint {model}/{relation}: {attribute} {sign}")
            }
        }
    }
}
