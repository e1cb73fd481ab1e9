use std::fs::File;
use std::path::Path;

use super::{AdapterError, Format, SourceDescriptor};
use crate::value::{parse_decimal, Column, ColumnType, ResultSet, Value};

/// Reads a single-file CSV source.
pub fn read_structured(src: &SourceDescriptor) -> Result<ResultSet, AdapterError> {
    src.require("csv", src.format == Format::Csv)?;
    if src.path().is_dir() {
        return Err(AdapterError::malformed(src.path(), "directory source: read one of its tables instead"));
    }
    read_csv_file(src.path(), src)
}

fn delimiter(src: &SourceDescriptor, path: &Path) -> Result<u8, AdapterError> {
    match src.options.get("delimiter").map(String::as_str) {
        None => Ok(b','),
        Some("\\t" | "tab") => Ok(b'\t'),
        Some(d) if d.len() == 1 => Ok(d.as_bytes()[0]),
        Some(d) => Err(AdapterError::malformed(path, format!("delimiter must be one byte, got {d:?}"))),
    }
}

/// Reads one CSV table. The first row is the header; a column is numeric
/// when it has at least one non-empty cell and every non-empty cell is a
/// decimal number. Empty cells are null.
pub fn read_csv_file(path: &Path, src: &SourceDescriptor) -> Result<ResultSet, AdapterError> {
    let file = File::open(path).map_err(|e| AdapterError::io(path, e))?;
    let mut reader =
        csv::ReaderBuilder::new().delimiter(delimiter(src, path)?).has_headers(false).flexible(true).from_reader(file);
    let csv_error = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => AdapterError::io(path, io),
        other => AdapterError::malformed(path, format!("{other:?}")),
    };
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => return Err(AdapterError::malformed(path, "empty file: no header row")),
    };
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    let mut raw = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        if record.len() != names.len() {
            return Err(AdapterError::RaggedRow {
                line: record.position().map_or(0, |p| p.line()),
                expected: names.len(),
                found: record.len(),
            });
        }
        raw.push(record.iter().map(|cell| (!cell.is_empty()).then(|| cell.to_string())).collect());
    }
    let (columns, rows) = type_columns(names, raw);
    let mut rs = ResultSet::new(columns);
    for row in rows {
        rs.push(row, &src.id);
    }
    Ok(rs)
}

/// Assigns column types to raw text cells (`None` = empty) and converts them.
pub(crate) fn type_columns(names: Vec<String>, raw: Vec<Vec<Option<String>>>) -> (Vec<Column>, Vec<Vec<Value>>) {
    let types: Vec<ColumnType> = (0..names.len())
        .map(|i| {
            let mut cells = raw.iter().filter_map(|r| r[i].as_deref()).peekable();
            if cells.peek().is_some() && cells.all(|c| parse_decimal(c).is_some()) {
                ColumnType::Number
            } else {
                ColumnType::Text
            }
        })
        .collect();
    let rows = raw
        .into_iter()
        .map(|r| {
            r.into_iter()
                .zip(&types)
                .map(|(cell, ty)| match (cell, ty) {
                    (None, _) => Value::Null,
                    (Some(c), ColumnType::Number) => Value::number(parse_decimal(&c).expect("typed as number")),
                    (Some(c), ColumnType::Text) => Value::Text(c),
                })
                .collect()
        })
        .collect();
    let columns = names.into_iter().zip(types).map(|(n, t)| Column::new(n, t)).collect();
    (columns, rows)
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn csv_source(content: &str) -> (tempfile::NamedTempFile, SourceDescriptor) {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        let src = SourceDescriptor::new("t", Format::Csv, f.path().to_string_lossy());
        (f, src)
    }

    #[test]
    fn sales_table() {
        let (_f, src) = csv_source("region,amount\neast,10\nwest,20\neast,5\n");
        let rs = read_structured(&src).unwrap();
        assert_eq!(
            rs.columns,
            vec![Column::new("region", ColumnType::Text), Column::new("amount", ColumnType::Number)]
        );
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.rows[1], vec![Value::text("west"), Value::number(20.0)]);
        assert_eq!(rs.provenance, vec!["t"; 3]);
    }

    #[test]
    fn header_only() {
        let (_f, src) = csv_source("region,amount\n");
        let rs = read_structured(&src).unwrap();
        assert_eq!(rs.columns.len(), 2);
        assert!(rs.is_empty());
    }

    #[test]
    fn ragged_row() {
        let (_f, src) = csv_source("a,b\n1,2\n1,2,3\n");
        assert!(matches!(read_structured(&src), Err(AdapterError::RaggedRow { line: 3, expected: 2, found: 3 })));
    }

    #[test]
    fn empty_file_has_no_header() {
        let (_f, src) = csv_source("");
        assert!(matches!(read_structured(&src), Err(AdapterError::MalformedDocument { .. })));
    }

    #[test]
    fn empty_cells_are_null_and_quoting_works() {
        let (_f, src) = csv_source("name,qty\n\"Smith, J\",\n\"x\"\"y\",3\n");
        let rs = read_structured(&src).unwrap();
        assert_eq!(rs.columns[1].ty, ColumnType::Number);
        assert_eq!(rs.rows[0], vec![Value::text("Smith, J"), Value::Null]);
        assert_eq!(rs.rows[1], vec![Value::text("x\"y"), Value::number(3.0)]);
    }

    #[test]
    fn mixed_column_is_text() {
        let (_f, src) = csv_source("v\n1\nx\n");
        let rs = read_structured(&src).unwrap();
        assert_eq!(rs.columns[0].ty, ColumnType::Text);
        assert_eq!(rs.rows[0], vec![Value::text("1")]);
    }

    #[test]
    fn custom_delimiter() {
        let (_f, src) = csv_source("a;b\n1;2\n");
        let rs = read_structured(&src.with_option("delimiter", ";")).unwrap();
        assert_eq!(rs.rows[0], vec![Value::number(1.0), Value::number(2.0)]);
    }

    #[test]
    fn missing_file() {
        let src = SourceDescriptor::new("t", Format::Csv, "/no/such/file.csv");
        assert!(matches!(read_structured(&src), Err(AdapterError::Io { .. })));
    }
}
