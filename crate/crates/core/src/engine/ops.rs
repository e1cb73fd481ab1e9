//! Operators over result sets: aggregation, set operations and the two
//! cleaning operators.

use std::collections::{BTreeMap, BTreeSet};

use super::EngineError;
use crate::catalog::Entity;
use crate::metalang::{AggKind, SetOpKind};
use crate::value::{ColumnType, ResultSet, Value};

fn column(rs: &ResultSet, name: &str) -> Result<usize, EngineError> {
    rs.column_index(name).ok_or_else(|| EngineError::NoSuchColumn(name.to_string()))
}

/// Aggregates one column, ignoring nulls. SUM of nothing is 0, AVG of
/// nothing is null.
pub fn aggregate(rs: &ResultSet, column_name: &str, kind: AggKind) -> Result<Value, EngineError> {
    let i = column(rs, column_name)?;
    let cells = rs.rows.iter().map(|r| &r[i]).filter(|v| !v.is_null());
    if kind == AggKind::Count {
        return Ok(Value::number(cells.count() as f64));
    }
    if rs.columns[i].ty != ColumnType::Number {
        return Err(EngineError::NonNumericColumn(column_name.to_string()));
    }
    let (mut sum, mut count) = (0.0, 0usize);
    for v in cells {
        sum += v.as_number().ok_or_else(|| EngineError::NonNumericColumn(column_name.to_string()))?;
        count += 1;
    }
    Ok(match kind {
        AggKind::Sum => Value::number(sum),
        _ if count == 0 => Value::Null,
        _ => Value::number(sum / count as f64),
    })
}

/// Set union, intersection or difference on whole rows. Output is
/// duplicate-free and sorted; a row present in both inputs keeps the
/// provenance it has in `a`.
pub fn set_op(kind: SetOpKind, a: &ResultSet, b: &ResultSet) -> Result<ResultSet, EngineError> {
    if a.columns != b.columns {
        return Err(EngineError::ColumnMismatch {
            left: a.columns.iter().map(ToString::to_string).collect(),
            right: b.columns.iter().map(ToString::to_string).collect(),
        });
    }
    let in_b: BTreeSet<&Vec<Value>> = b.rows.iter().collect();
    let mut out: BTreeMap<&Vec<Value>, &String> = BTreeMap::new();
    for (row, prov) in a.rows.iter().zip(&a.provenance) {
        let keep = match kind {
            SetOpKind::Union => true,
            SetOpKind::Inters => in_b.contains(row),
            SetOpKind::Differ => !in_b.contains(row),
        };
        if keep {
            out.entry(row).or_insert(prov);
        }
    }
    if kind == SetOpKind::Union {
        for (row, prov) in b.rows.iter().zip(&b.provenance) {
            out.entry(row).or_insert(prov);
        }
    }
    let mut rs = a.empty_like();
    for (row, prov) in out {
        rs.push(row.clone(), prov.as_str());
    }
    Ok(rs)
}

/// The cut operator, read as a constraint filter: drops rows violating any
/// constraint of `entity` whose attribute is a column of `rs`.
pub fn clean_cut(rs: &ResultSet, entity: &Entity) -> ResultSet {
    let mut applicable = entity.clone();
    applicable.constraints.retain(|k| rs.column_index(&k.attribute_name).is_some());
    let mut out = rs.empty_like();
    for (row, prov) in rs.rows.iter().zip(&rs.provenance) {
        let named: BTreeMap<String, Value> =
            rs.columns.iter().zip(row).map(|(c, v)| (c.name.clone(), v.clone())).collect();
        if applicable.check_constraints(&named).is_empty() {
            out.push(row.clone(), prov.as_str());
        }
    }
    out
}

/// The coagulation operator, read as deduplication: merges exact duplicate
/// rows, keeping the first occurrence in place.
pub fn clean_coagulate(rs: &ResultSet) -> ResultSet {
    let mut seen = BTreeSet::new();
    let mut out = rs.empty_like();
    for (row, prov) in rs.rows.iter().zip(&rs.provenance) {
        if seen.insert(row) {
            out.push(row.clone(), prov.as_str());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Attribute, AttributeType, Constraint};
    use crate::metalang::Comparator;
    use crate::value::Column;

    fn numbers(name: &str, cells: &[Option<f64>]) -> ResultSet {
        let mut rs = ResultSet::new(vec![Column::new(name, ColumnType::Number)]);
        for c in cells {
            rs.push(vec![c.map_or(Value::Null, Value::number)], "s");
        }
        rs
    }

    fn sales() -> ResultSet {
        let mut rs =
            ResultSet::new(vec![Column::new("region", ColumnType::Text), Column::new("amount", ColumnType::Number)]);
        for (r, a) in [("east", 10.0), ("west", 20.0), ("east", 5.0)] {
            rs.push(vec![Value::text(r), Value::number(a)], "src1");
        }
        rs
    }

    #[test]
    fn sales_aggregates() {
        let rs = sales();
        assert_eq!(aggregate(&rs, "amount", AggKind::Sum).unwrap(), Value::number(35.0));
        assert_eq!(aggregate(&rs, "amount", AggKind::Count).unwrap(), Value::number(3.0));
        let avg = aggregate(&rs, "amount", AggKind::Avg).unwrap().as_number().unwrap();
        assert!((avg - 35.0 / 3.0).abs() <= 1e-9);
        assert_eq!(aggregate(&rs, "region", AggKind::Count).unwrap(), Value::number(3.0));
        assert!(matches!(aggregate(&rs, "region", AggKind::Sum), Err(EngineError::NonNumericColumn(_))));
        assert!(matches!(aggregate(&rs, "nope", AggKind::Sum), Err(EngineError::NoSuchColumn(_))));
    }

    #[test]
    fn empty_and_null_aggregates() {
        let rs = numbers("x", &[]);
        assert_eq!(aggregate(&rs, "x", AggKind::Sum).unwrap(), Value::number(0.0));
        assert_eq!(aggregate(&rs, "x", AggKind::Count).unwrap(), Value::number(0.0));
        assert_eq!(aggregate(&rs, "x", AggKind::Avg).unwrap(), Value::Null);
        let rs = numbers("x", &[Some(1.0), None, Some(4.0)]);
        assert_eq!(aggregate(&rs, "x", AggKind::Count).unwrap(), Value::number(2.0));
        assert_eq!(aggregate(&rs, "x", AggKind::Avg).unwrap(), Value::number(2.5));
    }

    #[test]
    fn set_operations() {
        let a = numbers("x", &[Some(2.0), Some(1.0), Some(2.0)]);
        let b = numbers("x", &[Some(3.0), Some(2.0)]);
        let col = |rs: ResultSet| rs.rows.into_iter().map(|r| r[0].clone()).collect::<Vec<_>>();
        let n = Value::number;
        assert_eq!(col(set_op(SetOpKind::Union, &a, &b).unwrap()), [n(1.0), n(2.0), n(3.0)]);
        assert_eq!(col(set_op(SetOpKind::Inters, &a, &b).unwrap()), [n(2.0)]);
        assert_eq!(col(set_op(SetOpKind::Differ, &a, &b).unwrap()), [n(1.0)]);
        assert!(set_op(SetOpKind::Differ, &a, &a).unwrap().is_empty());
        let mismatch = numbers("y", &[]);
        assert!(matches!(set_op(SetOpKind::Union, &a, &mismatch), Err(EngineError::ColumnMismatch { .. })));
    }

    #[test]
    fn provenance_prefers_left() {
        let a = numbers("x", &[Some(1.0)]);
        let mut b = numbers("x", &[Some(1.0), Some(2.0)]);
        b.provenance = vec!["other".into(), "other".into()];
        let u = set_op(SetOpKind::Union, &a, &b).unwrap();
        assert_eq!(u.provenance, ["s", "other"]);
    }

    #[test]
    fn nulls_compare_equal() {
        let a = numbers("x", &[None, Some(1.0)]);
        let b = numbers("x", &[None]);
        assert_eq!(set_op(SetOpKind::Inters, &a, &b).unwrap().rows, vec![vec![Value::Null]]);
    }

    #[test]
    fn cut() {
        let entity = crate::catalog::Entity::new("t")
            .with_attribute(Attribute::new("x", AttributeType::Number))
            .with_constraint(Constraint::new("x", Comparator::Ge, Value::number(0.0), "negative"));
        let rs = numbers("x", &[Some(10.0), Some(-5.0), Some(20.0)]);
        let cut = clean_cut(&rs, &entity);
        assert_eq!(cut.rows, vec![vec![Value::number(10.0)], vec![Value::number(20.0)]]);
        assert_eq!(clean_cut(&cut, &entity), cut);
        let none = numbers("x", &[Some(-1.0)]);
        assert!(clean_cut(&none, &entity).is_empty());
        assert_eq!(clean_cut(&rs, &crate::catalog::Entity::new("t")), rs);
        let other = numbers("y", &[Some(-1.0)]);
        assert_eq!(clean_cut(&other, &entity), other, "constraints on absent columns do not apply");
    }

    #[test]
    fn coagulate() {
        let mut rs = sales();
        rs.push(vec![Value::text("east"), Value::number(10.0)], "src1");
        let c = clean_coagulate(&rs);
        assert_eq!(c.len(), 3);
        assert_eq!(c.rows[0], vec![Value::text("east"), Value::number(10.0)]);
        assert_eq!(clean_coagulate(&c), c);
        assert!(clean_coagulate(&rs.empty_like()).is_empty());
    }
}
