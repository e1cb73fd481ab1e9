use proptest::prelude::*;

use dataspace::adapters::*;
use dataspace::{Column, ColumnType, Value};

fn corpus(id: &str, file: &str) -> SourceDescriptor {
    SourceDescriptor::from_path(id, format!("data/corpus/{file}")).unwrap()
}

fn column<'a>(rs: &'a dataspace::ResultSet, name: &str) -> Vec<&'a Value> {
    let i = rs.column_index(name).unwrap();
    rs.rows.iter().map(|r| &r[i]).collect()
}

#[test]
fn csv_quoting_and_empty_cells() {
    let rs = read_structured(&corpus("customers", "customers.csv")).unwrap();
    assert_eq!(rs.len(), 4);
    assert_eq!(rs.columns[3], Column::new("since", ColumnType::Number));
    assert_eq!(column(&rs, "name")[2], &Value::text("Cobalt, Ltd"));
    assert_eq!(column(&rs, "since")[2], &Value::Null);
    assert!(rs.provenance.iter().all(|p| p == "customers"));
}

#[test]
fn xml_records() {
    let rs = read_semistructured(&corpus("orders", "orders.xml")).unwrap();
    assert_eq!(column(&rs, "@id"), [&Value::number(101.0), &Value::number(102.0), &Value::number(103.0)]);
    assert_eq!(column(&rs, "ship/express"), [&Value::text("yes"), &Value::Null, &Value::Null]);
    assert_eq!(column(&rs, "total")[0], &Value::number(25.5));
}

#[test]
fn json_records() {
    let rs = read_semistructured(&corpus("products", "products.json")).unwrap();
    assert_eq!(column(&rs, "stock/qty"), [&Value::number(1200.0), &Value::number(3400.0), &Value::Null]);
    assert_eq!(column(&rs, "discontinued"), [&Value::Null, &Value::Null, &Value::text("true")]);
}

#[test]
fn text_lines_and_keywords() {
    let src = corpus("reviews", "reviews.txt");
    assert_eq!(read_lines(&src).unwrap().len(), 3);
    let hits = keyword_search(&src, "EAST").unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits.rows[0][0], Value::text("data/corpus/reviews.txt"));
    assert_eq!(hits.rows[0][1], Value::number(2.0));
    assert!(keyword_search(&src, "ware").unwrap().is_empty());
    assert_eq!(keyword_search(&src, "sales").unwrap().len(), 1);
    assert!(read_structured(&src).is_err());
}

#[test]
fn schema_inference() {
    let e = infer_schema(&corpus("sales", "sales.csv")).unwrap();
    assert_eq!(e.name, "sales");
    assert_eq!(e.entity_type, "structured");
    let names: Vec<&str> = e.attributes.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["region", "amount"]);

    let wh = SourceDescriptor::from_path("wh", "data/warehouse").unwrap();
    let names: Vec<String> = infer_entities(&wh).unwrap().into_iter().map(|e| e.name).collect();
    assert_eq!(names, ["shipments", "stock"]);
    assert!(infer_schema(&wh).is_err());
    assert_eq!(read_entity(&wh, "stock").unwrap().len(), 40);
    assert!(matches!(read_entity(&wh, "nope"), Err(AdapterError::NoSuchTable { .. })));
}

#[test]
fn unsupported_and_missing() {
    assert!(matches!(detect_kind("logo.png"), Err(AdapterError::UnsupportedFormat(e)) if e == "png"));
    let src = SourceDescriptor::new("gone", Format::Csv, "data/corpus/gone.csv");
    assert!(matches!(read_structured(&src), Err(AdapterError::Io { .. })));
}

#[test]
fn custom_delimiter() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "a;b\n1;x\n2;y\n").unwrap();
    let src = SourceDescriptor::from_path("t", &path).unwrap().with_option("delimiter", ";");
    let rs = read_structured(&src).unwrap();
    assert_eq!(rs.columns, vec![Column::new("a", ColumnType::Number), Column::new("b", ColumnType::Text)]);
    let tab = SourceDescriptor::from_path("t", &path).unwrap().with_option("delimiter", "tab");
    assert_eq!(read_structured(&tab).unwrap().columns.len(), 1);
}

#[test]
fn ragged_rows_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "a,b\n1,2\n3\n").unwrap();
    let src = SourceDescriptor::from_path("t", &path).unwrap();
    assert!(matches!(read_structured(&src), Err(AdapterError::RaggedRow { line: 3, expected: 2, found: 1 })));
}

fn cell() -> impl Strategy<Value = Option<String>> {
    prop_oneof![
        1 => Just(None),
        2 => (-1000i32..1000).prop_map(|n| Some(n.to_string())),
        2 => "[a-z ,\"]{1,6}".prop_filter("blank", |s| !s.trim().is_empty()).prop_map(Some),
    ]
}

proptest! {
    /// Whatever the csv writer produces, the reader returns the same cells;
    /// a column is numeric exactly when all its non-empty cells are.
    #[test]
    fn csv_written_then_read(rows in proptest::collection::vec(proptest::collection::vec(cell(), 3), 1..8)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut w = csv::Writer::from_path(&path).unwrap();
        w.write_record(["c0", "c1", "c2"]).unwrap();
        for r in &rows {
            w.write_record(r.iter().map(|c| c.clone().unwrap_or_default())).unwrap();
        }
        w.flush().unwrap();
        let rs = read_structured(&SourceDescriptor::from_path("t", &path).unwrap()).unwrap();
        prop_assert_eq!(rs.len(), rows.len());
        for (j, col) in rs.columns.iter().enumerate() {
            let cells: Vec<&String> = rows.iter().filter_map(|r| r[j].as_ref()).collect();
            let numeric = !cells.is_empty() && cells.iter().all(|c| c.trim().parse::<f64>().is_ok());
            prop_assert_eq!(col.ty == ColumnType::Number, numeric);
            for (r, got) in rows.iter().zip(&rs.rows) {
                let want = match (&r[j], numeric) {
                    (None, _) => Value::Null,
                    (Some(c), true) => Value::number(c.trim().parse().unwrap()),
                    (Some(c), false) => Value::text(c.clone()),
                };
                prop_assert_eq!(&got[j], &want);
            }
        }
    }
}
