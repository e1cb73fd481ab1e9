//! The metadata catalog: sources, models and their elements, and synonyms.
//!
//! Collections are kept sorted by name at all times, so the in-memory value
//! and its file form agree and saving is byte-stable. Every mutation is
//! checked against the full invariant audit and leaves the catalog untouched
//! when it fails.

mod model;
mod path;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use model::*;
pub use path::ElementPath;

use crate::adapters::SourceDescriptor;
use crate::metalang::Comparator;

/// Catalog file format version.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog format error at line {line}, column {column}: {message}")]
    Format { line: usize, column: usize, message: String },
    #[error("unsupported catalog version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("catalog invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unknown parent: {0}")]
    UnknownParent(String),
    #[error("a {element} cannot be placed under {parent}")]
    InvalidPlacement { element: &'static str, parent: String },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("synonym `{name}` is ambiguous: {}", candidates.join(", "))]
    AmbiguousSynonym { name: String, candidates: Vec<String> },
    #[error("name `{name}` is ambiguous: {}", candidates.join(", "))]
    AmbiguousName { name: String, candidates: Vec<String> },
}

/// Anything that can be upserted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Model(Model),
    Entity(Entity),
    Relation(Relation),
    Attribute(Attribute),
    Constraint(Constraint),
}

impl Element {
    fn kind(&self) -> &'static str {
        match self {
            Element::Model(_) => "model",
            Element::Entity(_) => "entity",
            Element::Relation(_) => "relation",
            Element::Attribute(_) => "attribute",
            Element::Constraint(_) => "constraint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementRef<'a> {
    Model(&'a Model),
    Entity(&'a Entity),
    Relation(&'a Relation),
    Attribute(&'a Attribute),
    Constraint(&'a Constraint),
}

/// Result of a name lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Found<'a> {
    pub path: ElementPath,
    pub element: ElementRef<'a>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    All,
    In,
    Out,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    version: u32,
    #[serde(default)]
    sources: Vec<SourceDescriptor>,
    models: Vec<Model>,
    #[serde(default)]
    synonyms: BTreeMap<String, Vec<ElementPath>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Catalog {
    sources: Vec<SourceDescriptor>,
    models: Vec<Model>,
    synonyms: BTreeMap<String, Vec<ElementPath>>,
}

fn format_error(e: serde_json::Error) -> CatalogError {
    CatalogError::Format { line: e.line(), column: e.column(), message: e.to_string() }
}

impl Catalog {
    pub fn new() -> Catalog {
        Catalog::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })?;
        Catalog::from_json(&text)
    }

    /// Parses a catalog document. A bare JSON array is accepted as a list of
    /// models with no sources or synonyms.
    pub fn from_json(text: &str) -> Result<Catalog, CatalogError> {
        let file = if text.trim_start().starts_with('[') {
            let models: Vec<Model> = serde_json::from_str(text).map_err(format_error)?;
            CatalogFile { version: FORMAT_VERSION, sources: Vec::new(), models, synonyms: BTreeMap::new() }
        } else {
            serde_json::from_str(text).map_err(format_error)?
        };
        if file.version != FORMAT_VERSION {
            return Err(CatalogError::UnsupportedVersion(file.version));
        }
        let mut catalog = Catalog { sources: file.sources, models: file.models, synonyms: file.synonyms };
        catalog.normalize();
        catalog.check()?;
        Ok(catalog)
    }

    /// Deterministic document: object keys sorted, arrays in name order,
    /// two-space indentation, trailing newline.
    pub fn to_json(&self) -> String {
        let file = CatalogFile {
            version: FORMAT_VERSION,
            sources: self.sources.clone(),
            models: self.models.clone(),
            synonyms: self.synonyms.clone(),
        };
        // Routing through `serde_json::Value` sorts object keys.
        let value = serde_json::to_value(&file).expect("catalog serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("json value serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CatalogError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })
    }

    pub fn sources(&self) -> &[SourceDescriptor] {
        &self.sources
    }

    pub fn source(&self, id: &str) -> Option<&SourceDescriptor> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn model(&self, name: &str) -> Option<&Model> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn synonyms(&self) -> &BTreeMap<String, Vec<ElementPath>> {
        &self.synonyms
    }

    /// Source descriptor behind a model, if it is bound to one.
    pub fn source_of(&self, model: &str) -> Option<&SourceDescriptor> {
        self.model(model).and_then(|m| self.source(&m.connection))
    }

    fn model_mut(&mut self, name: &str) -> Option<&mut Model> {
        self.models.iter_mut().find(|m| m.name == name)
    }

    /// Applies `f` to a copy, audits it, and commits only if it is clean.
    fn transact<T>(&mut self, f: impl FnOnce(&mut Catalog) -> Result<T, CatalogError>) -> Result<T, CatalogError> {
        let mut next = self.clone();
        let out = f(&mut next)?;
        next.normalize();
        next.check()?;
        *self = next;
        Ok(out)
    }

    fn check(&self) -> Result<(), CatalogError> {
        let problems = self.audit();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CatalogError::InvariantViolation(problems.join("; ")))
        }
    }

    /// Registers or replaces a source descriptor by id.
    pub fn upsert_source(&mut self, source: SourceDescriptor) -> Result<(), CatalogError> {
        self.transact(|c| {
            c.sources.retain(|s| s.id != source.id);
            c.sources.push(source);
            Ok(())
        })
    }

    /// Removes a source; models bound to it become unbound.
    pub fn remove_source(&mut self, id: &str) -> Result<(), CatalogError> {
        if self.source(id).is_none() {
            return Err(CatalogError::NotFound(format!("source {id}")));
        }
        self.transact(|c| {
            c.sources.retain(|s| s.id != id);
            for m in c.models.iter_mut().filter(|m| m.connection == id) {
                m.connection.clear();
            }
            Ok(())
        })
    }

    /// Inserts `element` under `parent`, replacing any same-named element.
    ///
    /// Models go at the root (`parent = None`); entities and relations under
    /// a model; attributes under an entity; constraints under an entity or a
    /// relation.
    pub fn upsert(&mut self, parent: Option<&ElementPath>, element: Element) -> Result<(), CatalogError> {
        let misplaced = |parent: Option<&ElementPath>, element: &Element| CatalogError::InvalidPlacement {
            element: element.kind(),
            parent: parent.map_or_else(|| "the catalog root".to_string(), ToString::to_string),
        };
        if let Some(p) = parent {
            if self.get(p).is_err() {
                return Err(CatalogError::UnknownParent(p.to_string()));
            }
        }
        self.transact(|c| {
            match (parent, element) {
                (None, Element::Model(m)) => {
                    c.models.retain(|x| x.name != m.name);
                    c.models.push(m);
                }
                (Some(ElementPath::Model { model }), Element::Entity(e)) => {
                    let m = c.model_mut(model).expect("parent checked");
                    m.entities.retain(|x| x.name != e.name);
                    m.entities.push(e);
                }
                (Some(ElementPath::Model { model }), Element::Relation(r)) => {
                    let m = c.model_mut(model).expect("parent checked");
                    m.relations.retain(|x| x.name != r.name);
                    m.relations.push(r);
                }
                (Some(ElementPath::Entity { model, entity }), Element::Attribute(a)) => {
                    let e = c.entity_mut(model, entity).expect("parent checked");
                    e.attributes.retain(|x| x.name != a.name);
                    e.attributes.push(a);
                }
                (Some(ElementPath::Entity { model, entity }), Element::Constraint(k)) => {
                    let e = c.entity_mut(model, entity).expect("parent checked");
                    e.constraints.retain(|x| (&x.attribute_name, x.sign) != (&k.attribute_name, k.sign));
                    e.constraints.push(k);
                }
                (Some(ElementPath::Relation { model, relation }), Element::Constraint(k)) => {
                    let r = c.relation_mut(model, relation).expect("parent checked");
                    r.constraints.retain(|x| (&x.attribute_name, x.sign) != (&k.attribute_name, k.sign));
                    r.constraints.push(k);
                }
                (parent, element) => return Err(misplaced(parent, &element)),
            }
            Ok(())
        })
    }

    /// Inserts or replaces a whole model, dropping relations, constraints,
    /// links and synonyms that pointed into parts of the old model which
    /// the new one no longer has.
    pub fn replace_model(&mut self, model: Model) -> Result<(), CatalogError> {
        self.transact(|c| {
            c.models.retain(|x| x.name != model.name);
            c.models.push(model);
            c.prune_dangling();
            Ok(())
        })
    }

    fn entity_mut(&mut self, model: &str, entity: &str) -> Option<&mut Entity> {
        self.model_mut(model)?.entities.iter_mut().find(|e| e.name == entity)
    }

    fn relation_mut(&mut self, model: &str, relation: &str) -> Option<&mut Relation> {
        self.model_mut(model)?.relations.iter_mut().find(|r| r.name == relation)
    }

    /// Removes the element and everything that depended on it: an entity
    /// takes its relations with it, an attribute the constraints naming it,
    /// and any element its synonyms and links.
    pub fn remove(&mut self, path: &ElementPath) -> Result<(), CatalogError> {
        self.get(path)?;
        self.transact(|c| {
            match path {
                ElementPath::Model { model } => c.models.retain(|m| &m.name != model),
                ElementPath::Entity { model, entity } => {
                    let m = c.model_mut(model).expect("checked");
                    m.entities.retain(|e| &e.name != entity);
                }
                ElementPath::Attribute { model, entity, attribute } => {
                    let e = c.entity_mut(model, entity).expect("checked");
                    e.attributes.retain(|a| &a.name != attribute);
                }
                ElementPath::Relation { model, relation } => {
                    let m = c.model_mut(model).expect("checked");
                    m.relations.retain(|r| &r.name != relation);
                }
                ElementPath::EntityConstraint { model, entity, attribute, sign } => {
                    let e = c.entity_mut(model, entity).expect("checked");
                    e.constraints.retain(|k| !(&k.attribute_name == attribute && k.sign == *sign));
                }
                ElementPath::RelationConstraint { model, relation, attribute, sign } => {
                    let r = c.relation_mut(model, relation).expect("checked");
                    r.constraints.retain(|k| !(&k.attribute_name == attribute && k.sign == *sign));
                }
            }
            c.prune_dangling();
            Ok(())
        })
    }

    /// Drops references left dangling by a removal.
    fn prune_dangling(&mut self) {
        let model_names: BTreeSet<String> = self.models.iter().map(|m| m.name.clone()).collect();
        for m in &mut self.models {
            m.linked_models.retain(|l| model_names.contains(l));
            let entities: BTreeMap<&str, &Entity> = m.entities.iter().map(|e| (e.name.as_str(), e)).collect();
            m.relations.retain(|r| {
                entities.contains_key(r.start_entity.as_str()) && entities.contains_key(r.end_entity.as_str())
            });
            for r in &mut m.relations {
                let (s, e) = (entities[r.start_entity.as_str()], entities[r.end_entity.as_str()]);
                r.constraints
                    .retain(|k| s.attribute(&k.attribute_name).is_some() || e.attribute(&k.attribute_name).is_some());
            }
            for e in &mut m.entities {
                let names: BTreeSet<String> = e.attributes.iter().map(|a| a.name.clone()).collect();
                e.constraints.retain(|k| names.contains(&k.attribute_name));
            }
        }
        let snapshot = self.clone();
        for targets in self.synonyms.values_mut() {
            targets.retain(|t| snapshot.get(t).is_ok());
        }
        self.synonyms.retain(|_, targets| !targets.is_empty());
    }

    /// Adds `name` as a synonym of `target`.
    pub fn add_synonym(&mut self, name: &str, target: ElementPath) -> Result<(), CatalogError> {
        self.get(&target)?;
        self.transact(|c| {
            c.synonyms.entry(name.to_string()).or_default().push(target);
            Ok(())
        })
    }

    pub fn remove_synonym(&mut self, name: &str) -> Result<(), CatalogError> {
        self.synonyms.remove(name).map(|_| ()).ok_or_else(|| CatalogError::NotFound(format!("synonym {name}")))
    }

    pub fn get(&self, path: &ElementPath) -> Result<ElementRef<'_>, CatalogError> {
        let not_found = || CatalogError::NotFound(path.to_string());
        let model = self.model(path.model_name()).ok_or_else(not_found)?;
        let found = match path {
            ElementPath::Model { .. } => Some(ElementRef::Model(model)),
            ElementPath::Entity { entity, .. } => model.entity(entity).map(ElementRef::Entity),
            ElementPath::Attribute { entity, attribute, .. } => {
                model.entity(entity).and_then(|e| e.attribute(attribute)).map(ElementRef::Attribute)
            }
            ElementPath::Relation { relation, .. } => model.relation(relation).map(ElementRef::Relation),
            ElementPath::EntityConstraint { entity, attribute, sign, .. } => model
                .entity(entity)
                .and_then(|e| find_constraint(&e.constraints, attribute, *sign))
                .map(ElementRef::Constraint),
            ElementPath::RelationConstraint { relation, attribute, sign, .. } => model
                .relation(relation)
                .and_then(|r| find_constraint(&r.constraints, attribute, *sign))
                .map(ElementRef::Constraint),
        };
        found.ok_or_else(not_found)
    }

    /// Resolves a name: `entity.attribute` or a bare name, exact names first
    /// (entities, then relations, then models, then attributes), then the
    /// synonym table.
    pub fn lookup(&self, key: &str) -> Result<Found<'_>, CatalogError> {
        let mut tiers: Vec<Vec<ElementPath>> = Vec::new();
        if let Some((entity, attribute)) = key.split_once('.') {
            tiers.push(
                self.entity_paths(entity)
                    .filter_map(|(m, e)| {
                        e.attribute(attribute).map(|_| ElementPath::attribute(&m.name, entity, attribute))
                    })
                    .collect(),
            );
        } else {
            tiers.push(self.entity_paths(key).map(|(m, _)| ElementPath::entity(&m.name, key)).collect());
            tiers.push(
                self.models
                    .iter()
                    .filter(|m| m.relation(key).is_some())
                    .map(|m| ElementPath::relation(&m.name, key))
                    .collect(),
            );
            tiers.push(self.model(key).map(|m| ElementPath::model(&m.name)).into_iter().collect());
            tiers.push(
                self.models
                    .iter()
                    .flat_map(|m| m.entities.iter().map(move |e| (m, e)))
                    .filter(|(_, e)| e.attribute(key).is_some())
                    .map(|(m, e)| ElementPath::attribute(&m.name, &e.name, key))
                    .collect(),
            );
        }
        for tier in tiers {
            match tier.len() {
                0 => continue,
                1 => return self.found(tier.into_iter().next().expect("one")),
                _ => {
                    return Err(CatalogError::AmbiguousName {
                        name: key.to_string(),
                        candidates: tier.iter().map(ToString::to_string).collect(),
                    })
                }
            }
        }
        match self.synonyms.get(key).map(Vec::as_slice) {
            Some([only]) => self.found(only.clone()),
            Some(many) if !many.is_empty() => Err(CatalogError::AmbiguousSynonym {
                name: key.to_string(),
                candidates: many.iter().map(ToString::to_string).collect(),
            }),
            _ => Err(CatalogError::NotFound(key.to_string())),
        }
    }

    fn found(&self, path: ElementPath) -> Result<Found<'_>, CatalogError> {
        let element = self.get(&path)?;
        Ok(Found { path, element })
    }

    fn entity_paths<'a>(&'a self, entity: &'a str) -> impl Iterator<Item = (&'a Model, &'a Entity)> + 'a {
        self.models.iter().filter_map(move |m| m.entity(entity).map(|e| (m, e)))
    }

    /// Relations of an entity, sorted by name. A self-loop appears once in
    /// `All` and in both `In` and `Out`.
    pub fn relations_of(
        &self,
        model: &str,
        entity: &str,
        direction: Direction,
    ) -> Result<Vec<&Relation>, CatalogError> {
        let path = ElementPath::entity(model, entity);
        self.get(&path)?;
        let m = self.model(model).expect("checked");
        let mut out: Vec<&Relation> = m
            .relations
            .iter()
            .filter(|r| match direction {
                Direction::Out => r.start_entity == entity,
                Direction::In => r.end_entity == entity,
                Direction::All => r.touches(entity),
            })
            .collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(out)
    }

    /// Puts every collection into canonical order.
    fn normalize(&mut self) {
        self.sources.sort_by(|a, b| a.id.cmp(&b.id));
        self.models.sort_by(|a, b| a.name.cmp(&b.name));
        for m in &mut self.models {
            m.linked_models.sort();
            m.entities.sort_by(|a, b| a.name.cmp(&b.name));
            m.relations.sort_by(|a, b| a.name.cmp(&b.name));
            for e in &mut m.entities {
                e.attributes.sort_by(|a, b| a.name.cmp(&b.name));
                e.constraints.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
            }
            for r in &mut m.relations {
                r.constraints.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
            }
        }
        for targets in self.synonyms.values_mut() {
            targets.sort();
            targets.dedup();
        }
    }

    /// Full referential-integrity and type audit; empty when the catalog is
    /// consistent.
    pub fn audit(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut seen_sources = BTreeSet::new();
        for s in &self.sources {
            if !seen_sources.insert(&s.id) {
                problems.push(format!("duplicate source id `{}`", s.id));
            }
            if let Err(e) = s.check() {
                problems.push(e.to_string());
            }
        }
        let model_names: BTreeSet<&str> = self.models.iter().map(|m| m.name.as_str()).collect();
        if model_names.len() != self.models.len() {
            problems.push("duplicate model names".into());
        }
        for m in &self.models {
            audit_model(self, m, &model_names, &mut problems);
        }
        for (name, targets) in &self.synonyms {
            if !crate::metalang::lexer::is_identifier(name) {
                problems.push(format!("synonym `{name}` is not an identifier"));
            }
            if targets.is_empty() {
                problems.push(format!("synonym `{name}` has no target"));
            }
            for t in targets {
                if self.get(t).is_err() {
                    problems.push(format!("synonym `{name}` points at missing {t}"));
                } else if let Some(m) = self.model(t.model_name()) {
                    if primary_names(m).contains(name.as_str()) {
                        problems.push(format!("synonym `{name}` shadows an element of model `{}`", m.name));
                    }
                }
            }
        }
        problems
    }
}

fn find_constraint<'a>(constraints: &'a [Constraint], attribute: &str, sign: Comparator) -> Option<&'a Constraint> {
    constraints.iter().find(|k| k.attribute_name == attribute && k.sign == sign)
}

fn primary_names(m: &Model) -> BTreeSet<&str> {
    let mut names = BTreeSet::from([m.name.as_str()]);
    for e in &m.entities {
        names.insert(&e.name);
        names.extend(e.attributes.iter().map(|a| a.name.as_str()));
    }
    names.extend(m.relations.iter().map(|r| r.name.as_str()));
    names
}

fn audit_constraints(
    owner: &str,
    constraints: &[Constraint],
    attr: impl Fn(&str) -> Option<AttributeType>,
    problems: &mut Vec<String>,
) {
    let mut seen = BTreeSet::new();
    for k in constraints {
        if !seen.insert((&k.attribute_name, k.sign)) {
            problems.push(format!("{owner}: duplicate constraint `{} {}`", k.attribute_name, k.sign));
        }
        match attr(&k.attribute_name) {
            None => problems.push(format!("{owner}: constraint names missing attribute `{}`", k.attribute_name)),
            Some(ty) if !ty.admits(&k.value) => problems.push(format!(
                "{owner}: constraint value {:?} does not fit attribute `{}` of type {ty}",
                k.value, k.attribute_name
            )),
            Some(_) => {}
        }
    }
}

fn audit_model(c: &Catalog, m: &Model, model_names: &BTreeSet<&str>, problems: &mut Vec<String>) {
    let owner = format!("model `{}`", m.name);
    if !m.connection.is_empty() && c.source(&m.connection).is_none() {
        problems.push(format!("{owner}: connection `{}` is not a registered source", m.connection));
    }
    let mut links = BTreeSet::new();
    for l in &m.linked_models {
        if l == &m.name {
            problems.push(format!("{owner} links to itself"));
        } else if !model_names.contains(l.as_str()) {
            problems.push(format!("{owner} links to missing model `{l}`"));
        }
        if !links.insert(l) {
            problems.push(format!("{owner} links to `{l}` twice"));
        }
    }
    let mut entity_names = BTreeSet::new();
    for e in &m.entities {
        let owner = format!("entity `{}/{}`", m.name, e.name);
        if !entity_names.insert(e.name.as_str()) {
            problems.push(format!("{owner} is duplicated"));
        }
        let mut attr_names = BTreeSet::new();
        for a in &e.attributes {
            if !attr_names.insert(a.name.as_str()) {
                problems.push(format!("{owner}: duplicate attribute `{}`", a.name));
            }
            if let Some(d) = &a.default {
                if !a.ty.admits(d) {
                    problems.push(format!("{owner}: default of `{}` does not fit type {}", a.name, a.ty));
                }
            }
        }
        audit_constraints(&owner, &e.constraints, |n| e.attribute(n).map(|a| a.ty.clone()), problems);
    }
    let mut relation_names = BTreeSet::new();
    for r in &m.relations {
        let owner = format!("relation `{}/{}`", m.name, r.name);
        if !relation_names.insert(r.name.as_str()) {
            problems.push(format!("{owner} is duplicated"));
        }
        if r.start_min > r.start_max || r.end_min > r.end_max {
            problems.push(format!("{owner}: minimum cardinality exceeds maximum"));
        }
        if r.start_min == Cardinality::Unbounded || r.end_min == Cardinality::Unbounded {
            problems.push(format!("{owner}: minimum cardinality cannot be unbounded"));
        }
        let (start, end) = (m.entity(&r.start_entity), m.entity(&r.end_entity));
        if start.is_none() {
            problems.push(format!("{owner}: start entity `{}` missing", r.start_entity));
        }
        if end.is_none() {
            problems.push(format!("{owner}: end entity `{}` missing", r.end_entity));
        }
        audit_constraints(
            &owner,
            &r.constraints,
            |n| start.and_then(|e| e.attribute(n)).or_else(|| end.and_then(|e| e.attribute(n))).map(|a| a.ty.clone()),
            problems,
        );
    }
}
