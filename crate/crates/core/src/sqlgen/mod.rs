//! Translation of validated queries over structured sources into SQL.
//!
//! Output is one line of generic SQL: uppercase keywords, single spaces, no
//! trailing semicolon. Table names are entity names.

use std::fmt;

use crate::adapters::Category;
use crate::metalang::{
    ArithOp, Bindings, BoundQuery, EntityBinding, Expr, ItemBinding, Predicate, SetOpKind, ValidatedQuery,
};
use crate::value::format_number;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SqlError {
    #[error("not translatable to SQL: {0}")]
    NotTranslatable(String),
    #[error("operands come from different sources (`{left}` and `{right}`)")]
    CrossSourceSetOp { left: String, right: String },
    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dialect {
    #[default]
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlText {
    pub statement: String,
    pub dialect: Dialect,
}

impl fmt::Display for SqlText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.statement)
    }
}

fn expr(e: &Expr, params: &Bindings, out: &mut String) -> Result<(), SqlError> {
    match e {
        Expr::Number(n) => out.push_str(&n.to_string()),
        Expr::Param(p) => {
            let v = *params.get(p).ok_or_else(|| SqlError::UnboundParameter(p.clone()))?;
            if v < 0.0 {
                out.push_str(&format!("({})", format_number(v)));
            } else {
                out.push_str(&format_number(v));
            }
        }
        Expr::Paren(inner) => {
            out.push('(');
            expr(inner, params, out)?;
            out.push(')');
        }
        Expr::Binary { op, lhs, rhs } => {
            operand(lhs, *op, false, params, out)?;
            out.push(' ');
            out.push(op.symbol());
            out.push(' ');
            operand(rhs, *op, true, params, out)?;
        }
    }
    Ok(())
}

/// Renders a binary operand, adding parentheses a hand-built tree would
/// otherwise lose to SQL precedence.
fn operand(e: &Expr, parent: ArithOp, right: bool, params: &Bindings, out: &mut String) -> Result<(), SqlError> {
    let needs = match e {
        Expr::Binary { op, .. } => {
            op.precedence() < parent.precedence()
                || (right && op.precedence() == parent.precedence() && matches!(parent, ArithOp::Sub | ArithOp::Div))
        }
        _ => false,
    };
    if needs {
        out.push('(');
    }
    expr(e, params, out)?;
    if needs {
        out.push(')');
    }
    Ok(())
}

/// `attribute SIGN value` for one predicate, with parameters replaced by
/// their bound values.
pub fn translate_predicate(p: &Predicate, params: &Bindings) -> Result<String, SqlError> {
    let mut out = format!("{} {} ", p.attribute, p.comparator.symbol());
    expr(&p.rhs, params, &mut out)?;
    Ok(out)
}

fn require_structured(e: &EntityBinding) -> Result<(), SqlError> {
    if e.category == Category::Structured {
        Ok(())
    } else {
        Err(SqlError::NotTranslatable(format!("`{}` lives in a {} source", e.entity, e.category)))
    }
}

fn same_source<'a>(entities: impl IntoIterator<Item = &'a EntityBinding>) -> Result<(), SqlError> {
    let mut first: Option<&EntityBinding> = None;
    for e in entities {
        require_structured(e)?;
        match first {
            None => first = Some(e),
            Some(f) if f.source != e.source => {
                return Err(SqlError::CrossSourceSetOp { left: f.source.clone(), right: e.source.clone() })
            }
            _ => {}
        }
    }
    Ok(())
}

fn select_item(item: &ItemBinding) -> String {
    match (&item.attribute, item.agg) {
        (Some(a), None) => a.clone(),
        (Some(a), Some(k)) => format!("{}({a})", k.keyword()),
        (None, Some(k)) => format!("{}(*)", k.keyword()),
        (None, None) => "*".to_string(),
    }
}

/// One SELECT over a single entity; plain columns next to aggregates
/// become the GROUP BY list.
fn select(items: &[&ItemBinding]) -> String {
    let list: Vec<String> = items.iter().map(|i| select_item(i)).collect();
    let mut sql = format!("SELECT {} FROM {}", list.join(", "), items[0].entity.entity);
    let plain: Vec<&str> = items.iter().filter(|i| i.agg.is_none()).filter_map(|i| i.attribute.as_deref()).collect();
    if !plain.is_empty() && plain.len() < items.len() {
        sql.push_str(" GROUP BY ");
        sql.push_str(&plain.join(", "));
    }
    sql
}

/// Translates with no parameter values.
pub fn translate(vq: &ValidatedQuery) -> Result<SqlText, SqlError> {
    translate_with(vq, &Bindings::new())
}

pub fn translate_with(vq: &ValidatedQuery, params: &Bindings) -> Result<SqlText, SqlError> {
    let statement = match &vq.bound {
        BoundQuery::Projection { items, .. } => {
            same_source(items.iter().map(|i| &i.entity))?;
            let mut order: Vec<&EntityBinding> = Vec::new();
            for i in items {
                if !order.contains(&&i.entity) {
                    order.push(&i.entity);
                }
            }
            let parts: Vec<String> =
                order.iter().map(|e| select(&items.iter().filter(|i| &i.entity == *e).collect::<Vec<_>>())).collect();
            parts.join(" UNION ALL ")
        }
        BoundQuery::Filter { entity, predicates } => {
            require_structured(entity)?;
            let mut sql = format!("SELECT * FROM {}", entity.entity);
            let conds = predicates.iter().map(|p| translate_predicate(p, params)).collect::<Result<Vec<_>, _>>()?;
            if !conds.is_empty() {
                sql.push_str(" WHERE ");
                sql.push_str(&conds.join(" AND "));
            }
            sql
        }
        BoundQuery::SetOp { kind, items } => {
            same_source(items.iter().map(|i| &i.entity))?;
            let op = match kind {
                SetOpKind::Union => " UNION ",
                SetOpKind::Inters => " INTERSECT ",
                SetOpKind::Differ => " EXCEPT ",
            };
            items.iter().map(|i| select(&[i])).collect::<Vec<_>>().join(op)
        }
        BoundQuery::Semant { .. } | BoundQuery::Profile { .. } => {
            return Err(SqlError::NotTranslatable(format!("{} queries", vq.ast.keyword())))
        }
    };
    Ok(SqlText { statement, dialect: Dialect::Generic })
}
