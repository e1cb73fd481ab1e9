//! Source access by category: CSV tables, JSON/XML record documents and
//! plain text, plus schema inference over all of them.
//!
//! A structured source is either one CSV file (a single table) or a directory
//! of CSV files, where each file is a table named after its stem.

mod schema;
mod semistructured;
mod structured;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub(crate) use schema::entity_name;
pub use schema::{infer_entities, infer_schema};
pub use semistructured::read_semistructured;
pub use structured::{read_csv_file, read_structured};
pub use text::{build_semantic_net, keyword_search, read_lines, SemanticNet};

use crate::value::ResultSet;

#[derive(Debug, thiserror::Error)]
pub enum AdapterError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported source format `{0}`")]
    UnsupportedFormat(String),
    #[error("row at line {line} has {found} cells, header has {expected}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("malformed document {}: {message}", path.display())]
    MalformedDocument { path: PathBuf, message: String },
    #[error("nested array at `{0}` is not supported")]
    NestedArrayUnsupported(String),
    #[error("source `{id}` is {actual}, expected {expected}")]
    WrongFormat { id: String, expected: &'static str, actual: Format },
    #[error("invalid source `{id}`: {category} data cannot be {format}")]
    InvalidKind { id: String, category: Category, format: Format },
    #[error("source `{source_id}` has no table `{table}`")]
    NoSuchTable { source_id: String, table: String },
}

impl AdapterError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> AdapterError {
        AdapterError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn malformed(path: &Path, message: impl Into<String>) -> AdapterError {
        AdapterError::MalformedDocument { path: path.to_path_buf(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Structured,
    Semistructured,
    Unstructured,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Structured => "structured",
            Category::Semistructured => "semistructured",
            Category::Unstructured => "unstructured",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Xml,
    Json,
    Txt,
}

impl Format {
    pub fn category(self) -> Category {
        match self {
            Format::Csv => Category::Structured,
            Format::Xml | Format::Json => Category::Semistructured,
            Format::Txt => Category::Unstructured,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Xml => "xml",
            Format::Json => "json",
            Format::Txt => "txt",
        })
    }
}

/// Maps a path to its source kind by extension; a directory is a structured
/// source holding one CSV table per file.
pub fn detect_kind(path: impl AsRef<Path>) -> Result<(Category, Format), AdapterError> {
    let path = path.as_ref();
    if path.is_dir() {
        return Ok((Category::Structured, Format::Csv));
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let format = match ext.to_ascii_lowercase().as_str() {
        "csv" => Format::Csv,
        "xml" => Format::Xml,
        "json" => Format::Json,
        "txt" => Format::Txt,
        _ => return Err(AdapterError::UnsupportedFormat(ext.to_string())),
    };
    Ok((format.category(), format))
}

/// A registered data source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDescriptor {
    pub id: String,
    pub category: Category,
    pub format: Format,
    pub location: String,
    /// Reader options, e.g. `delimiter` for CSV.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, String>,
}

impl SourceDescriptor {
    pub fn new(id: impl Into<String>, format: Format, location: impl Into<String>) -> SourceDescriptor {
        SourceDescriptor {
            id: id.into(),
            category: format.category(),
            format,
            location: location.into(),
            options: BTreeMap::new(),
        }
    }

    /// Descriptor for `path`, with the kind detected from it.
    pub fn from_path(id: impl Into<String>, path: impl AsRef<Path>) -> Result<SourceDescriptor, AdapterError> {
        let path = path.as_ref();
        let (_, format) = detect_kind(path)?;
        Ok(SourceDescriptor::new(id, format, path.to_string_lossy()))
    }

    pub fn with_option(mut self, key: impl Into<String>, value: impl Into<String>) -> SourceDescriptor {
        self.options.insert(key.into(), value.into());
        self
    }

    pub fn path(&self) -> &Path {
        Path::new(&self.location)
    }

    pub fn check(&self) -> Result<(), AdapterError> {
        if self.format.category() == self.category {
            Ok(())
        } else {
            Err(AdapterError::InvalidKind { id: self.id.clone(), category: self.category, format: self.format })
        }
    }

    fn require(&self, expected: &'static str, ok: bool) -> Result<(), AdapterError> {
        if ok {
            Ok(())
        } else {
            Err(AdapterError::WrongFormat { id: self.id.clone(), expected, actual: self.format })
        }
    }

    /// File behind a table of this source.
    pub fn table_path(&self, table: &str) -> Result<PathBuf, AdapterError> {
        let base = self.path();
        if !base.is_dir() {
            return Ok(base.to_path_buf());
        }
        let file = base.join(format!("{table}.csv"));
        if file.is_file() {
            Ok(file)
        } else {
            Err(AdapterError::NoSuchTable { source_id: self.id.clone(), table: table.to_string() })
        }
    }
}

/// Reads the rows behind `entity` in `src`, whatever its category.
pub fn read_entity(src: &SourceDescriptor, entity: &str) -> Result<ResultSet, AdapterError> {
    match src.format {
        Format::Csv => read_csv_file(&src.table_path(entity)?, src),
        Format::Json | Format::Xml => read_semistructured(src),
        Format::Txt => read_lines(src),
    }
}
