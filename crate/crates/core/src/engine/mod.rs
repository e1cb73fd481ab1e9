//! Federated evaluation of validated queries.
//!
//! Each object is read through the adapter for its source category, so one
//! query may combine CSV tables, JSON/XML documents and text files.

mod ops;
mod store;

use std::collections::BTreeMap;
use std::path::PathBuf;

pub use ops::{aggregate, clean_coagulate, clean_cut, set_op};
pub use store::{ProfileStore, RuntimeHistory};

use crate::adapters::{build_semantic_net, read_entity, AdapterError, Category};
use crate::catalog::Catalog;
use crate::metalang::{Bindings, BoundQuery, EntityBinding, ExprError, ItemBinding, ValidatedQuery};
use crate::value::{Column, ColumnType, ResultSet, Value};

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("source `{0}` is not registered")]
    UnknownSource(String),
    #[error("no column `{0}` in the source data")]
    NoSuchColumn(String),
    #[error("column `{0}` is not numeric")]
    NonNumericColumn(String),
    #[error("column mismatch: [{}] vs [{}]", left.join(", "), right.join(", "))]
    ColumnMismatch { left: Vec<String>, right: Vec<String> },
    #[error("`{entity}` is not a text source")]
    NotText { entity: String },
    #[error("profile weight must not be negative, got {0}")]
    NegativeWeight(i64),
    #[error("duration must be a non-negative number of milliseconds, got {0}")]
    NegativeDuration(f64),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

/// Per-invocation state: who is asking, their profile store, and values
/// for the parameters named in predicates.
#[derive(Debug, Clone)]
pub struct Session {
    pub user: String,
    pub profiles: ProfileStore,
    pub params: Bindings,
}

impl Session {
    pub fn new(user: impl Into<String>) -> Session {
        Session { user: user.into(), profiles: ProfileStore::new(), params: Bindings::new() }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Session {
        self.params.insert(name.to_string(), value);
        self
    }
}

/// Output column name of an item: the attribute, `KIND(attribute)`, or
/// `COUNT(*)`.
pub fn item_column_name(item: &ItemBinding) -> String {
    match (&item.attribute, item.agg) {
        (Some(a), None) => a.clone(),
        (Some(a), Some(k)) => format!("{}({a})", k.keyword()),
        (None, Some(k)) => format!("{}(*)", k.keyword()),
        (None, None) => "*".to_string(),
    }
}

fn read(catalog: &Catalog, e: &EntityBinding) -> Result<ResultSet, EngineError> {
    let src = catalog.source(&e.source).ok_or_else(|| EngineError::UnknownSource(e.source.clone()))?;
    Ok(read_entity(src, &e.entity)?)
}

fn column_of(rs: &ResultSet, name: &str) -> Result<usize, EngineError> {
    rs.column_index(name).ok_or_else(|| EngineError::NoSuchColumn(name.to_string()))
}

/// Projects items that all refer to the entity read into `rs`. Plain items
/// keep every row; aggregates alone give one row; plain items next to
/// aggregates group by the plain columns.
fn project(rs: &ResultSet, items: &[&ItemBinding], source: &str) -> Result<ResultSet, EngineError> {
    if let [only] = items {
        if only.attribute.is_none() && only.agg.is_none() {
            return Ok(rs.clone());
        }
    }
    let mut columns = Vec::with_capacity(items.len());
    let mut plain = Vec::new();
    for item in items {
        match (&item.attribute, item.agg) {
            (Some(a), None) => {
                let i = column_of(rs, a)?;
                plain.push(i);
                columns.push(Column::new(a.clone(), rs.columns[i].ty));
            }
            (Some(a), Some(_)) => {
                column_of(rs, a)?;
                columns.push(Column::new(item_column_name(item), ColumnType::Number));
            }
            _ => columns.push(Column::new(item_column_name(item), ColumnType::Number)),
        }
    }
    let mut out = ResultSet::new(columns);
    if plain.len() == items.len() {
        for (row, prov) in rs.rows.iter().zip(&rs.provenance) {
            out.push(plain.iter().map(|&i| row[i].clone()).collect(), prov.as_str());
        }
        return Ok(out);
    }
    let mut groups: BTreeMap<Vec<Value>, ResultSet> = BTreeMap::new();
    if plain.is_empty() {
        groups.insert(Vec::new(), rs.clone());
    } else {
        for (row, prov) in rs.rows.iter().zip(&rs.provenance) {
            let key = plain.iter().map(|&i| row[i].clone()).collect();
            groups.entry(key).or_insert_with(|| rs.empty_like()).push(row.clone(), prov.as_str());
        }
    }
    for group in groups.values() {
        let mut row = Vec::with_capacity(items.len());
        for item in items {
            row.push(match (&item.attribute, item.agg) {
                (Some(a), None) => group.rows[0][column_of(group, a)?].clone(),
                (Some(a), Some(k)) => aggregate(group, a, k)?,
                (None, _) => Value::number(group.len() as f64),
            });
        }
        out.push(row, source);
    }
    Ok(out)
}

/// Evaluates items grouped by entity, then concatenates the per-entity
/// results (which must agree on column types).
fn projection(catalog: &Catalog, items: &[ItemBinding]) -> Result<ResultSet, EngineError> {
    let mut order: Vec<&EntityBinding> = Vec::new();
    for i in items {
        if !order.contains(&&i.entity) {
            order.push(&i.entity);
        }
    }
    let mut out: Option<ResultSet> = None;
    for entity in order {
        let group: Vec<&ItemBinding> = items.iter().filter(|i| &i.entity == entity).collect();
        let part = project(&read(catalog, entity)?, &group, &entity.source)?;
        out = Some(match out {
            None => part,
            Some(mut acc) => {
                let types = |rs: &ResultSet| rs.columns.iter().map(|c| c.ty).collect::<Vec<_>>();
                if types(&acc) != types(&part) {
                    return Err(EngineError::ColumnMismatch {
                        left: acc.columns.iter().map(ToString::to_string).collect(),
                        right: part.columns.iter().map(ToString::to_string).collect(),
                    });
                }
                acc.rows.extend(part.rows);
                acc.provenance.extend(part.provenance);
                acc
            }
        });
    }
    Ok(out.expect("queries have at least one item"))
}

fn filter(
    catalog: &Catalog,
    entity: &EntityBinding,
    predicates: &[crate::metalang::Predicate],
    params: &Bindings,
) -> Result<ResultSet, EngineError> {
    let rs = read(catalog, entity)?;
    let mut tests = Vec::with_capacity(predicates.len());
    for p in predicates {
        let i = column_of(&rs, &p.attribute)?;
        if rs.columns[i].ty != ColumnType::Number && rs.rows.iter().any(|r| !r[i].is_null()) {
            return Err(EngineError::NonNumericColumn(p.attribute.clone()));
        }
        tests.push((i, p.comparator, p.rhs.eval(params)?));
    }
    let mut out = rs.empty_like();
    for (row, prov) in rs.rows.iter().zip(&rs.provenance) {
        let keep = tests
            .iter()
            .all(|&(i, cmp, rhs)| row[i].as_number().and_then(|x| x.partial_cmp(&rhs)).is_some_and(|o| cmp.holds(o)));
        if keep {
            out.push(row.clone(), prov.as_str());
        }
    }
    Ok(out)
}

fn semant(catalog: &Catalog, entity: &EntityBinding, term: &str) -> Result<ResultSet, EngineError> {
    let src = catalog.source(&entity.source).ok_or_else(|| EngineError::UnknownSource(entity.source.clone()))?;
    if src.category != Category::Unstructured {
        return Err(EngineError::NotText { entity: entity.entity.clone() });
    }
    let net = build_semantic_net(src)?;
    let mut out =
        ResultSet::new(vec![Column::new("term", ColumnType::Text), Column::new("weight", ColumnType::Number)]);
    for (t, w) in net.neighbors(term) {
        out.push(vec![Value::Text(t), Value::number(w as f64)], src.id.as_str());
    }
    Ok(out)
}

/// Evaluates a validated query. Only `profile` queries change state, and
/// only the session's profile store.
pub fn execute(vq: &ValidatedQuery, catalog: &Catalog, session: &mut Session) -> Result<ResultSet, EngineError> {
    match &vq.bound {
        BoundQuery::Projection { items, .. } => projection(catalog, items),
        BoundQuery::Filter { entity, predicates } => filter(catalog, entity, predicates, &session.params),
        BoundQuery::Semant { entity, term } => semant(catalog, entity, term),
        BoundQuery::Profile { entries } => {
            let mut next = session.profiles.clone();
            for (e, w) in entries {
                next.put(&session.user, &e.entity, i64::try_from(*w).unwrap_or(i64::MAX))?;
            }
            session.profiles = next;
            Ok(ResultSet::new(Vec::new()))
        }
        BoundQuery::SetOp { kind, items } => {
            let mut parts = items.iter().map(|i| projection(catalog, std::slice::from_ref(i)));
            let mut acc = parts.next().expect("set operations have operands")?;
            for part in parts {
                acc = set_op(*kind, &acc, &part?)?;
            }
            Ok(acc)
        }
    }
}
