//! Name resolution of a parsed query against the catalog.
//!
//! Objects resolve to entities, directly or through a synonym. A synonym that
//! names an attribute resolves to the owning entity with that attribute as
//! the implied `par`. Pars resolve to attributes of the bound entity, again
//! directly or through a synonym.

use crate::adapters::Category;
use crate::catalog::{AttributeType, Catalog, ElementPath, Entity};

use super::ast::{AggKind, ObjectItem, Predicate, QueryAst, QuestionKind, SetOpKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("entity `{entity}` has no attribute `{name}`")]
    UnknownAttribute { entity: String, name: String },
    #[error("synonym `{name}` is ambiguous: {}", candidates.join(", "))]
    AmbiguousSynonym { name: String, candidates: Vec<String> },
    #[error("name `{name}` is ambiguous: {}", candidates.join(", "))]
    AmbiguousName { name: String, candidates: Vec<String> },
    #[error("`{question}` expects {role} entities, `{entity}` is tagged `{actual}`")]
    RoleMismatch { question: &'static str, role: &'static str, entity: String, actual: String },
    #[error("{agg} on `{object}` needs an attribute")]
    AggregateNeedsAttribute { object: String, agg: &'static str },
    #[error("bare object `{0}` cannot be combined with other items on the same entity")]
    MixedBareObject(String),
    #[error("predicate on `{entity}.{attribute}` needs a number attribute")]
    NonNumericPredicate { entity: String, attribute: String },
    #[error("model `{model}` of entity `{entity}` is not bound to a registered source")]
    NoSource { model: String, entity: String },
}

/// Where an object lives: catalog coordinates plus the source to read.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityBinding {
    pub model: String,
    pub entity: String,
    pub source: String,
    pub category: Category,
}

/// One resolved `object[.par] [Agg KIND]` item. No attribute means the whole
/// row (or `COUNT(*)` under `Agg COUNT`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemBinding {
    pub entity: EntityBinding,
    pub attribute: Option<String>,
    pub agg: Option<AggKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundQuery {
    /// `Se` and the question operators.
    Projection {
        question: Option<QuestionKind>,
        items: Vec<ItemBinding>,
    },
    /// `Cons`; predicate attributes are resolved attribute names.
    Filter {
        entity: EntityBinding,
        predicates: Vec<Predicate>,
    },
    Semant {
        entity: EntityBinding,
        term: String,
    },
    Profile {
        entries: Vec<(EntityBinding, u64)>,
    },
    SetOp {
        kind: SetOpKind,
        items: Vec<ItemBinding>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedQuery {
    pub ast: QueryAst,
    pub bound: BoundQuery,
}

impl ValidatedQuery {
    /// Runtime-history key: operator keyword and the first bound source
    /// category, e.g. `Se/structured`.
    pub fn shape_key(&self) -> String {
        let category = match &self.bound {
            BoundQuery::Projection { items, .. } | BoundQuery::SetOp { items, .. } => {
                items.first().map(|i| i.entity.category)
            }
            BoundQuery::Filter { entity, .. } | BoundQuery::Semant { entity, .. } => Some(entity.category),
            BoundQuery::Profile { entries } => entries.first().map(|(e, _)| e.category),
        };
        match category {
            Some(c) => format!("{}/{c}", self.ast.keyword()),
            None => self.ast.keyword().to_string(),
        }
    }

    /// Every entity the query touches, in item order, without repeats.
    pub fn entities(&self) -> Vec<&EntityBinding> {
        let all: Vec<&EntityBinding> = match &self.bound {
            BoundQuery::Projection { items, .. } | BoundQuery::SetOp { items, .. } => {
                items.iter().map(|i| &i.entity).collect()
            }
            BoundQuery::Filter { entity, .. } | BoundQuery::Semant { entity, .. } => vec![entity],
            BoundQuery::Profile { entries } => entries.iter().map(|(e, _)| e).collect(),
        };
        let mut out: Vec<&EntityBinding> = Vec::new();
        for e in all {
            if !out.contains(&e) {
                out.push(e);
            }
        }
        out
    }
}

const ROLES: [&str; 5] = ["agent", "location", "subject", "selector", "measure"];

struct Resolver<'c> {
    catalog: &'c Catalog,
    role_tagged: bool,
}

impl<'c> Resolver<'c> {
    fn new(catalog: &'c Catalog) -> Resolver<'c> {
        let role_tagged =
            catalog.models().iter().flat_map(|m| &m.entities).any(|e| ROLES.contains(&e.entity_type.as_str()));
        Resolver { catalog, role_tagged }
    }

    fn entity(&self, model: &str, entity: &str) -> &'c Entity {
        self.catalog.model(model).and_then(|m| m.entity(entity)).expect("resolved entity exists")
    }

    fn binding(&self, model: &str, entity: &str) -> Result<EntityBinding, ValidateError> {
        let src = self
            .catalog
            .source_of(model)
            .ok_or_else(|| ValidateError::NoSource { model: model.to_string(), entity: entity.to_string() })?;
        Ok(EntityBinding {
            model: model.to_string(),
            entity: entity.to_string(),
            source: src.id.clone(),
            category: src.category,
        })
    }

    /// Resolves an object name to `(model, entity, implied attribute)`.
    fn object(&self, name: &str) -> Result<(String, String, Option<String>), ValidateError> {
        let direct: Vec<&str> =
            self.catalog.models().iter().filter(|m| m.entity(name).is_some()).map(|m| m.name.as_str()).collect();
        match direct.as_slice() {
            [model] => return Ok((model.to_string(), name.to_string(), None)),
            [] => {}
            many => {
                return Err(ValidateError::AmbiguousName {
                    name: name.to_string(),
                    candidates: many.iter().map(|m| ElementPath::entity(m, name).to_string()).collect(),
                })
            }
        }
        match self.catalog.synonyms().get(name).map(Vec::as_slice) {
            Some([ElementPath::Entity { model, entity }]) => Ok((model.clone(), entity.clone(), None)),
            Some([ElementPath::Attribute { model, entity, attribute }]) => {
                Ok((model.clone(), entity.clone(), Some(attribute.clone())))
            }
            Some([_]) | None | Some([]) => Err(ValidateError::UnknownObject(name.to_string())),
            Some(many) => Err(ValidateError::AmbiguousSynonym {
                name: name.to_string(),
                candidates: many.iter().map(ToString::to_string).collect(),
            }),
        }
    }

    /// Resolves `name` to an attribute of the given entity.
    fn attribute(&self, model: &str, entity: &str, name: &str) -> Result<String, ValidateError> {
        if self.entity(model, entity).attribute(name).is_some() {
            return Ok(name.to_string());
        }
        let targets: Vec<&String> = self
            .catalog
            .synonyms()
            .get(name)
            .into_iter()
            .flatten()
            .filter_map(|t| match t {
                ElementPath::Attribute { model: m, entity: e, attribute } if m == model && e == entity => {
                    Some(attribute)
                }
                _ => None,
            })
            .collect();
        match targets.as_slice() {
            [only] => Ok((*only).clone()),
            [] => Err(ValidateError::UnknownAttribute { entity: entity.to_string(), name: name.to_string() }),
            many => Err(ValidateError::AmbiguousSynonym {
                name: name.to_string(),
                candidates: many.iter().map(|a| ElementPath::attribute(model, entity, a).to_string()).collect(),
            }),
        }
    }

    fn item(&self, item: &ObjectItem, question: Option<QuestionKind>) -> Result<ItemBinding, ValidateError> {
        let (model, entity, implied) = self.object(&item.object)?;
        if let (Some(q), true) = (question, self.role_tagged) {
            let actual = &self.entity(&model, &entity).entity_type;
            if actual != q.role() {
                return Err(ValidateError::RoleMismatch {
                    question: q.keyword(),
                    role: q.role(),
                    entity: entity.clone(),
                    actual: actual.clone(),
                });
            }
        }
        let attribute = match &item.par {
            Some(par) => Some(self.attribute(&model, &entity, par)?),
            None => implied,
        };
        if let (Some(agg @ (AggKind::Sum | AggKind::Avg)), None) = (item.agg, &attribute) {
            return Err(ValidateError::AggregateNeedsAttribute { object: item.object.clone(), agg: agg.keyword() });
        }
        Ok(ItemBinding { entity: self.binding(&model, &entity)?, attribute, agg: item.agg })
    }

    fn items(&self, items: &[ObjectItem], question: Option<QuestionKind>) -> Result<Vec<ItemBinding>, ValidateError> {
        let bound = items.iter().map(|i| self.item(i, question)).collect::<Result<Vec<_>, _>>()?;
        for (i, b) in bound.iter().enumerate() {
            let bare = b.attribute.is_none() && b.agg.is_none();
            let shared = bound.iter().enumerate().any(|(j, o)| j != i && o.entity == b.entity);
            if bare && shared {
                return Err(ValidateError::MixedBareObject(items[i].object.clone()));
            }
        }
        Ok(bound)
    }

    fn predicate(&self, model: &str, entity: &str, p: &Predicate) -> Result<Predicate, ValidateError> {
        let attribute = self.attribute(model, entity, &p.attribute)?;
        let ty = &self.entity(model, entity).attribute(&attribute).expect("resolved attribute").ty;
        if *ty != AttributeType::Number {
            return Err(ValidateError::NonNumericPredicate { entity: entity.to_string(), attribute });
        }
        Ok(Predicate { attribute, comparator: p.comparator, rhs: p.rhs.clone() })
    }
}

/// Resolves every name in `q` against `catalog`.
pub fn validate(q: &QueryAst, catalog: &Catalog) -> Result<ValidatedQuery, ValidateError> {
    let r = Resolver::new(catalog);
    let bound = match q {
        QueryAst::Select(items) => BoundQuery::Projection { question: None, items: r.items(items, None)? },
        QueryAst::Question { kind, items } => {
            BoundQuery::Projection { question: Some(*kind), items: r.items(items, Some(*kind))? }
        }
        QueryAst::Cons { object, predicates } => {
            let (model, entity, _) = r.object(object)?;
            let predicates =
                predicates.iter().map(|p| r.predicate(&model, &entity, p)).collect::<Result<Vec<_>, _>>()?;
            BoundQuery::Filter { entity: r.binding(&model, &entity)?, predicates }
        }
        QueryAst::Semant { object, term } => {
            let (model, entity, _) = r.object(object)?;
            BoundQuery::Semant { entity: r.binding(&model, &entity)?, term: term.clone() }
        }
        QueryAst::Profile(entries) => {
            let entries = entries
                .iter()
                .map(|e| {
                    let (model, entity, _) = r.object(&e.object)?;
                    Ok((r.binding(&model, &entity)?, e.weight))
                })
                .collect::<Result<Vec<_>, ValidateError>>()?;
            BoundQuery::Profile { entries }
        }
        QueryAst::SetOp { kind, items } => {
            let items = items.iter().map(|i| r.item(i, None)).collect::<Result<Vec<_>, _>>()?;
            BoundQuery::SetOp { kind: *kind, items }
        }
    };
    Ok(ValidatedQuery { ast: q.clone(), bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapters::{Format, SourceDescriptor};
    use crate::catalog::{Attribute, Element, Model};
    use crate::metalang::parse;

    /// The shared fixture catalog, bound to a CSV source `src1` and a text
    /// source `notes`, with `turnover` naming the `sales` entity.
    fn catalog() -> Catalog {
        let mut c = crate::catalog::tests::fixture();
        c.upsert_source(SourceDescriptor::new("src1", Format::Csv, "sales.csv")).unwrap();
        c.upsert_source(SourceDescriptor::new("notes", Format::Txt, "reviews.txt")).unwrap();
        let mut shop = c.model("shop").unwrap().clone();
        shop.connection = "src1".into();
        c.upsert(None, Element::Model(shop)).unwrap();
        let mut text = Model::new("text");
        text.connection = "notes".into();
        c.upsert(None, Element::Model(text)).unwrap();
        let reviews = Entity::new("reviews").with_attribute(Attribute::new("content", AttributeType::Text));
        c.upsert(Some(&ElementPath::model("text")), Element::Entity(reviews)).unwrap();
        c.remove_synonym("turnover").unwrap();
        c.add_synonym("turnover", ElementPath::entity("shop", "sales")).unwrap();
        c.add_synonym("revenue", ElementPath::attribute("shop", "sales", "amount")).unwrap();
        c
    }

    fn check(text: &str) -> Result<ValidatedQuery, ValidateError> {
        validate(&parse(text).unwrap(), &catalog())
    }

    fn sales() -> EntityBinding {
        EntityBinding {
            model: "shop".into(),
            entity: "sales".into(),
            source: "src1".into(),
            category: Category::Structured,
        }
    }

    #[test]
    fn select_with_aggregate() {
        let vq = check("Se(sales.amount Agg SUM)").unwrap();
        assert_eq!(
            vq.bound,
            BoundQuery::Projection {
                question: None,
                items: vec![ItemBinding { entity: sales(), attribute: Some("amount".into()), agg: Some(AggKind::Sum) }]
            }
        );
        assert_eq!(vq.shape_key(), "Se/structured");
    }

    #[test]
    fn entity_synonym() {
        let BoundQuery::Projection { items, .. } = check("Se(turnover)").unwrap().bound else { panic!() };
        assert_eq!(items[0].entity, sales());
        assert_eq!(items[0].attribute, None);
    }

    #[test]
    fn attribute_synonym_as_object_and_par() {
        let BoundQuery::Projection { items, .. } = check("Se(revenue, sales.revenue Agg AVG)").unwrap().bound else {
            panic!()
        };
        assert_eq!(items[0].attribute.as_deref(), Some("amount"));
        assert_eq!(items[1].attribute.as_deref(), Some("amount"));
    }

    #[test]
    fn unknown_names() {
        assert_eq!(check("Se(nosuch)"), Err(ValidateError::UnknownObject("nosuch".into())));
        assert_eq!(
            check("Se(sales.price)"),
            Err(ValidateError::UnknownAttribute { entity: "sales".into(), name: "price".into() })
        );
    }

    #[test]
    fn ambiguous_synonym() {
        let mut c = catalog();
        c.add_synonym("stuff", ElementPath::entity("shop", "customer")).unwrap();
        c.add_synonym("stuff", ElementPath::entity("shop", "sales")).unwrap();
        let err = validate(&parse("Se(stuff)").unwrap(), &c).unwrap_err();
        assert!(
            matches!(err, ValidateError::AmbiguousSynonym { ref name, ref candidates } if name == "stuff" && candidates.len() == 2)
        );
    }

    #[test]
    fn aggregates_need_attributes() {
        assert!(matches!(check("Se(sales Agg SUM)"), Err(ValidateError::AggregateNeedsAttribute { .. })));
        assert!(check("Se(sales Agg COUNT)").is_ok());
        assert_eq!(check("Se(sales, sales.amount)"), Err(ValidateError::MixedBareObject("sales".into())));
    }

    #[test]
    fn cons_resolves_predicates() {
        let BoundQuery::Filter { predicates, .. } = check("Cons(sales, revenue > 10)").unwrap().bound else { panic!() };
        assert_eq!(predicates[0].attribute, "amount");
        assert!(matches!(check("Cons(sales, region = 1)"), Err(ValidateError::NonNumericPredicate { .. })));
    }

    #[test]
    fn unbound_model() {
        let mut c = catalog();
        c.remove_source("src1").unwrap();
        let err = validate(&parse("Se(sales.amount)").unwrap(), &c).unwrap_err();
        assert_eq!(err, ValidateError::NoSource { model: "shop".into(), entity: "sales".into() });
    }

    #[test]
    fn question_roles() {
        assert!(check("who(sales.region)").is_ok(), "untagged catalogs accept any kind");
        let mut c = catalog();
        let mut m = c.model("shop").unwrap().clone();
        m.entities.iter_mut().find(|e| e.name == "customer").unwrap().entity_type = "agent".into();
        c.upsert(None, Element::Model(m)).unwrap();
        assert!(validate(&parse("who(customer.name)").unwrap(), &c).is_ok());
        assert!(matches!(
            validate(&parse("who(sales.region)").unwrap(), &c),
            Err(ValidateError::RoleMismatch { role: "agent", .. })
        ));
    }

    #[test]
    fn semant_and_profile() {
        let vq = check("Semant(reviews.quality)").unwrap();
        assert_eq!(vq.shape_key(), "Semant/unstructured");
        let BoundQuery::Profile { entries } = check("profile(turnover.5, reviews)").unwrap().bound else { panic!() };
        assert_eq!(entries[0], (sales(), 5));
        assert_eq!(entries[1].0.entity, "reviews");
    }
}
