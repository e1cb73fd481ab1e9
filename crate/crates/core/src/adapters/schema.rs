use std::path::Path;

use super::{read_csv_file, read_semistructured, AdapterError, Category, Format, SourceDescriptor};
use crate::catalog::{Attribute, AttributeType, Entity};
use crate::value::{ColumnType, ResultSet};

/// Entity name for a file: its stem with characters outside `[A-Za-z0-9_]`
/// replaced by `_`, prefixed with `t` unless it starts with a letter.
pub(crate) fn entity_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let mut name: String = stem.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        name.insert(0, 't');
    }
    name
}

fn draw_type(category: Category) -> &'static str {
    match category {
        Category::Structured => "table",
        Category::Semistructured => "tree",
        Category::Unstructured => "text",
    }
}

fn entity_from(name: String, category: Category, columns: Option<&ResultSet>) -> Entity {
    let mut entity = Entity::new(name);
    entity.entity_type = category.to_string();
    entity.draw_type = draw_type(category).to_string();
    match columns {
        Some(rs) => {
            for c in &rs.columns {
                let ty = match c.ty {
                    ColumnType::Number => AttributeType::Number,
                    ColumnType::Text => AttributeType::Text,
                };
                entity.attributes.push(Attribute::new(c.name.clone(), ty));
            }
        }
        None => entity.attributes.push(Attribute::new("content", AttributeType::Text)),
    }
    entity
}

/// The entity describing a single-file source: named after the file stem,
/// one attribute per column the matching reader produces. Text sources get
/// a single `content: text` attribute.
pub fn infer_schema(src: &SourceDescriptor) -> Result<Entity, AdapterError> {
    let path = src.path();
    let name = entity_name(path);
    match src.format {
        Format::Csv if path.is_dir() => Err(AdapterError::malformed(path, "directory source: use infer_entities")),
        Format::Csv => Ok(entity_from(name, src.category, Some(&read_csv_file(path, src)?))),
        Format::Json | Format::Xml => Ok(entity_from(name, src.category, Some(&read_semistructured(src)?))),
        Format::Txt => {
            if !path.is_file() {
                std::fs::metadata(path).map_err(|e| AdapterError::io(path, e))?;
            }
            Ok(entity_from(name, src.category, None))
        }
    }
}

/// All entities of a source: one per `.csv` file (sorted by name) for a
/// directory source, otherwise the single [`infer_schema`] entity.
pub fn infer_entities(src: &SourceDescriptor) -> Result<Vec<Entity>, AdapterError> {
    let path = src.path();
    if src.format != Format::Csv || !path.is_dir() {
        return Ok(vec![infer_schema(src)?]);
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(|e| AdapterError::io(path, e))? {
        let file = entry.map_err(|e| AdapterError::io(path, e))?.path();
        if file.is_file() && file.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            files.push(file);
        }
    }
    files.sort();
    files.iter().map(|f| Ok(entity_from(entity_name(f), src.category, Some(&read_csv_file(f, src)?)))).collect()
}
