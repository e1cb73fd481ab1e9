use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::structured::type_columns;
use super::{AdapterError, Format, SourceDescriptor};
use crate::value::{format_number, Column, ColumnType, ResultSet, Value};

/// Reads a JSON array of objects, or an XML document whose root element's
/// children are the records. Nested objects and elements flatten into
/// slash-joined column paths; columns come out sorted by path.
pub fn read_semistructured(src: &SourceDescriptor) -> Result<ResultSet, AdapterError> {
    src.require("json or xml", matches!(src.format, Format::Json | Format::Xml))?;
    let path = src.path();
    let text = std::fs::read_to_string(path).map_err(|e| AdapterError::io(path, e))?;
    let (columns, rows) = match src.format {
        Format::Json => json_records(path, &text)?,
        _ => xml_records(path, &text)?,
    };
    let mut rs = ResultSet::new(columns);
    for row in rows {
        rs.push(row, &src.id);
    }
    Ok(rs)
}

type Flat<T> = BTreeMap<String, T>;

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}/{name}")
    }
}

fn json_records(path: &Path, text: &str) -> Result<(Vec<Column>, Vec<Vec<Value>>), AdapterError> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| AdapterError::malformed(path, e.to_string()))?;
    let serde_json::Value::Array(items) = doc else {
        return Err(AdapterError::malformed(path, "top level must be an array of records"));
    };
    let mut records = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let serde_json::Value::Object(_) = item else {
            return Err(AdapterError::malformed(path, format!("record {i} is not an object")));
        };
        let mut flat = Flat::new();
        flatten_json("", item, &mut flat)?;
        records.push(flat);
    }
    let names: BTreeSet<&String> = records.iter().flat_map(|r| r.keys()).collect();
    let mut columns = Vec::with_capacity(names.len());
    for name in &names {
        let mut cells = records.iter().filter_map(|r| r.get(*name)).filter(|v| !v.is_null()).peekable();
        let numeric = cells.peek().is_some() && cells.all(|v| v.is_number());
        columns.push(Column::new(name.as_str(), if numeric { ColumnType::Number } else { ColumnType::Text }));
    }
    let rows = records
        .iter()
        .map(|r| {
            columns
                .iter()
                .map(|c| match r.get(&c.name) {
                    None | Some(serde_json::Value::Null) => Value::Null,
                    Some(v) => json_scalar(v, c.ty),
                })
                .collect()
        })
        .collect();
    Ok((columns, rows))
}

fn json_scalar(v: &serde_json::Value, ty: ColumnType) -> Value {
    match (v, ty) {
        (serde_json::Value::Number(n), ColumnType::Number) => Value::number(n.as_f64().unwrap_or(f64::NAN)),
        (serde_json::Value::Number(n), ColumnType::Text) => Value::Text(format_number(n.as_f64().unwrap_or(f64::NAN))),
        (serde_json::Value::String(s), _) => Value::Text(s.clone()),
        (other, _) => Value::Text(other.to_string()),
    }
}

fn flatten_json<'a>(
    prefix: &str,
    v: &'a serde_json::Value,
    out: &mut Flat<&'a serde_json::Value>,
) -> Result<(), AdapterError> {
    match v {
        serde_json::Value::Object(map) => {
            for (k, child) in map {
                flatten_json(&join(prefix, k), child, out)?;
            }
        }
        serde_json::Value::Array(_) => return Err(AdapterError::NestedArrayUnsupported(prefix.to_string())),
        scalar => {
            out.insert(prefix.to_string(), scalar);
        }
    }
    Ok(())
}

fn xml_records(path: &Path, text: &str) -> Result<(Vec<Column>, Vec<Vec<Value>>), AdapterError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| AdapterError::malformed(path, e.to_string()))?;
    let mut records = Vec::new();
    for record in doc.root_element().children().filter(roxmltree::Node::is_element) {
        let mut flat = Flat::new();
        if record.children().any(|c| c.is_element()) || record.attributes().len() > 0 {
            flatten_xml("", record, &mut flat)?;
        } else {
            leaf_text(record.tag_name().name(), record, &mut flat);
        }
        records.push(flat);
    }
    let names: Vec<String> =
        records.iter().flat_map(|r| r.keys()).collect::<BTreeSet<_>>().into_iter().cloned().collect();
    let raw = records.iter().map(|r| names.iter().map(|n| r.get(n).cloned().flatten()).collect()).collect();
    Ok(type_columns(names, raw))
}

fn leaf_text(key: &str, node: roxmltree::Node, out: &mut Flat<Option<String>>) {
    let text: String = node.children().filter(|c| c.is_text()).filter_map(|c| c.text()).collect();
    let text = text.trim();
    out.insert(key.to_string(), (!text.is_empty()).then(|| text.to_string()));
}

/// Flattens the attributes and child elements of `node` under `prefix`.
fn flatten_xml(prefix: &str, node: roxmltree::Node, out: &mut Flat<Option<String>>) -> Result<(), AdapterError> {
    for attr in node.attributes() {
        out.insert(join(prefix, &format!("@{}", attr.name())), Some(attr.value().to_string()));
    }
    let mut seen = BTreeSet::new();
    for child in node.children().filter(roxmltree::Node::is_element) {
        let key = join(prefix, child.tag_name().name());
        if !seen.insert(key.clone()) {
            return Err(AdapterError::NestedArrayUnsupported(key));
        }
        if child.children().any(|c| c.is_element()) {
            flatten_xml(&key, child, out)?;
        } else {
            for attr in child.attributes() {
                out.insert(join(&key, &format!("@{}", attr.name())), Some(attr.value().to_string()));
            }
            leaf_text(&key, child, out);
        }
    }
    Ok(())
}
