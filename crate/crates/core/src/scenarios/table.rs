//! Output tables and their CSV and JSON encodings.
//!
//! Numbers are written with 12 significant digits, so files are
//! byte-identical across runs and platforms.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json_number(*v),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A named table with a header row and scalar metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: BTreeMap<String, Value>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn meta_num(&mut self, key: &str, v: f64) {
        self.meta.insert(key.to_string(), json_number(v));
    }

    pub fn meta_nums(&mut self, key: &str, vs: &[f64]) {
        self.meta.insert(
            key.to_string(),
            Value::Array(vs.iter().map(|&v| json_number(v)).collect()),
        );
    }

    pub fn meta_text(&mut self, key: &str, v: &str) {
        self.meta.insert(key.to_string(), json!(v));
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match r[i] {
                Cell::Num(v) => Some(v),
                Cell::Int(k) => Some(k as f64),
                Cell::Text(_) => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))
                .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "meta": self.meta,
        })
    }
}

/// Decimal rendering with 12 significant digits, trailing zeros trimmed;
/// scientific notation outside `[1e-5, 1e12)`.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// JSON number rounded like the CSV; non-finite values become strings.
fn json_number(v: f64) -> Value {
    if v.is_finite() {
        let rounded: f64 = format_sig(v).parse().expect("formatted float parses");
        json!(rounded)
    } else {
        json!(format_sig(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_sig(0.0100168), "0.0100168");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(1e-7), "1e-7");
        assert_eq!(format_sig(4.6858673677877344e7), "46858673.6779");
        assert_eq!(format_sig(9.9999999999996), "10");
        assert_eq!(format_sig(5.19e19), "5.19e19");
        assert_eq!(format_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_has_header_and_lf() {
        let mut t = Table::new("t", &["n", "rate", "note"]);
        t.push(vec![64usize.into(), 0.5.into(), "a,b".into()]);
        assert_eq!(t.to_csv().unwrap(), "n,rate,note\n64,0.5,\"a,b\"\n");
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new("t", &["x"]);
        t.push(vec![f64::INFINITY.into()]);
        t.meta_num("max", 1.0 / 3.0);
        let j = t.to_json();
        assert_eq!(j["rows"][0][0], "inf");
        assert_eq!(j["meta"]["max"], 0.333333333333);
    }
}
