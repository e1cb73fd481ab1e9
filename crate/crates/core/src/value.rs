//! Cell values and the uniform tabular result shape shared by every source
//! category.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest magnitude at which every integer is exactly representable in an f64.
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Number,
    Text,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Number => "number",
            ColumnType::Text => "text",
        })
    }
}

/// A single cell.
///
/// Ordering is total: `Null < Number < Text`, numbers by value, text
/// lexicographically. Two nulls compare equal, which is what set operations
/// want.
#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Number(f64),
    Text(String),
}

impl Value {
    /// Builds a number cell, folding `-0` into `0` so equality and ordering agree.
    pub fn number(x: f64) -> Value {
        if x == 0.0 {
            Value::Number(0.0)
        } else {
            Value::Number(x)
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Number(_) => 1,
            Value::Text(_) => 2,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.total_cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

/// Minimal decimal rendering: integral values carry no fractional part.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Number(x) => f.write_str(&format_number(*x)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Null => serializer.serialize_unit(),
            Value::Number(x) if x.fract() == 0.0 && x.abs() < EXACT_INT_LIMIT => serializer.serialize_i64(*x as i64),
            Value::Number(x) => serializer.serialize_f64(*x),
            Value::Text(s) => serializer.serialize_str(s),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ValueVisitor;

        impl Visitor<'_> for ValueVisitor {
            type Value = Value;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number, a string or null")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
                Ok(Value::number(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                Ok(Value::number(v as f64))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Value, E> {
                Ok(Value::number(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                Ok(Value::Text(v.to_string()))
            }

            fn visit_string<E: de::Error>(self, v: String) -> Result<Value, E> {
                Ok(Value::Text(v))
            }

            fn visit_unit<E: de::Error>(self) -> Result<Value, E> {
                Ok(Value::Null)
            }

            fn visit_none<E: de::Error>(self) -> Result<Value, E> {
                Ok(Value::Null)
            }
        }

        deserializer.deserialize_any(ValueVisitor)
    }
}

/// Accepts `[+-]digits[.digits]`, the only textual numbers the readers type
/// as numeric.
pub fn parse_decimal(s: &str) -> Option<f64> {
    let t = s.trim();
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int) || frac.is_some_and(|f| !all_digits(f)) {
        return None;
    }
    t.parse::<f64>().ok().map(|x| if x == 0.0 { 0.0 } else { x })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
}

impl Column {
    pub fn new(name: impl Into<String>, ty: ColumnType) -> Column {
        Column { name: name.into(), ty }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// Typed columns, rows, and the id of the source each row came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    pub provenance: Vec<String>,
}

impl ResultSet {
    pub fn new(columns: Vec<Column>) -> ResultSet {
        ResultSet { columns, rows: Vec::new(), provenance: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>, source: impl Into<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.provenance.push(source.into());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Same columns, no rows.
    pub fn empty_like(&self) -> ResultSet {
        ResultSet::new(self.columns.clone())
    }

    /// Sorts rows by natural value order, carrying provenance along.
    pub fn sort_rows(&mut self) {
        let mut paired: Vec<(Vec<Value>, String)> = self.rows.drain(..).zip(self.provenance.drain(..)).collect();
        paired.sort();
        for (row, prov) in paired {
            self.rows.push(row);
            self.provenance.push(prov);
        }
    }

    /// `|`-separated table with a header line; null cells are empty.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join("|"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&cells.join("|"));
            out.push('\n');
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        writer.write_record(self.columns.iter().map(|c| c.name.as_str())).expect("in-memory csv write");
        for row in &self.rows {
            writer.write_record(row.iter().map(ToString::to_string)).expect("in-memory csv write");
        }
        let bytes = writer.into_inner().expect("in-memory csv flush");
        String::from_utf8(bytes).expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_render_minimally() {
        assert_eq!(Value::number(35.0).to_string(), "35");
        assert_eq!(Value::number(-0.0).to_string(), "0");
        assert_eq!(Value::number(2.5).to_string(), "2.5");
        assert_eq!(Value::Null.to_string(), "");
    }

    #[test]
    fn ordering_is_null_number_text() {
        let mut v = vec![Value::text("a"), Value::number(2.0), Value::Null, Value::number(-1.0)];
        v.sort();
        assert_eq!(v, vec![Value::Null, Value::number(-1.0), Value::number(2.0), Value::text("a")]);
        assert_eq!(Value::number(0.0), Value::number(-0.0));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("10"), Some(10.0));
        assert_eq!(parse_decimal(" -2.50 "), Some(-2.5));
        assert_eq!(parse_decimal("+3"), Some(3.0));
        for bad in ["", "1e5", "inf", "NaN", ".5", "5.", "1.2.3", "x1", "--1"] {
            assert_eq!(parse_decimal(bad), None, "{bad}");
        }
    }

    #[test]
    fn table_rendering() {
        let mut rs =
            ResultSet::new(vec![Column::new("region", ColumnType::Text), Column::new("amount", ColumnType::Number)]);
        rs.push(vec![Value::text("east"), Value::number(10.0)], "s");
        rs.push(vec![Value::Null, Value::number(0.5)], "s");
        assert_eq!(rs.render_table(), "region|amount\neast|10\n|0.5\n");
        assert_eq!(rs.render_csv(), "region,amount\neast,10\n,0.5\n");
    }

    #[test]
    fn serde_keeps_integers_integral() {
        let json = serde_json::to_string(&vec![Value::number(3.0), Value::number(0.25), Value::Null]).unwrap();
        assert_eq!(json, "[3,0.25,null]");
        let back: Vec<Value> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Value::number(3.0), Value::number(0.25), Value::Null]);
    }
}
