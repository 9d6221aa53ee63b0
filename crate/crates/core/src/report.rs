//! Canonical JSON and CSV emission.
//!
//! Output is byte-stable: object keys are sorted, floats carry 17 significant
//! digits (enough to round-trip an `f64`), non-finite floats become `null`,
//! and every document ends with a newline.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Unsupported(format!("output format {other:?}"))),
        }
    }
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
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

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Anything the CLI can emit.
pub trait Report: Serialize {
    fn table(&self) -> Table;
}

pub fn emit_report<R: Report + ?Sized>(report: &R, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Json => canonical_json(&serde_json::to_value(report)?).into_bytes(),
        Format::Csv => render_csv(&report.table()).into_bytes(),
    })
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        // keep the sign of zero out of the canonical form
        return Some("0.0000000000000000e0".to_string());
    }
    Some(format!("{x:.16e}"))
}

pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                match n.as_f64().and_then(fmt_float) {
                    Some(s) => out.push_str(&s),
                    None => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key encodes"));
                out.push(':');
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(t: &Table) -> String {
    let mut out = t.header.iter().map(|h| csv_text(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(x) => fmt_float(*x).unwrap_or_default(),
                Cell::Text(s) => csv_text(s),
                Cell::Empty => String::new(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub(crate) fn ser_decimal<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_decimal_vec<T: std::fmt::Display, S: Serializer>(
    v: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn ser_rational_vec<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let v = json!({"zeta": 1, "alpha": 0.1, "mid": [1.5, null, "x"]});
        assert_eq!(
            canonical_json(&v),
            "{\"alpha\":1.0000000000000001e-1,\"mid\":[1.5000000000000000e0,null,\"x\"],\"zeta\":1}\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            let s = fmt_float(x).unwrap();
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let parsed: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(parsed, x);
        }
        assert_eq!(fmt_float(f64::NAN), None);
        assert_eq!(fmt_float(-0.0), fmt_float(0.0));
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["n", "threshold", "m", "violations"]);
        assert_eq!(render_csv(&t), "n,threshold,m,violations\n");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!(matches!("xml".parse::<Format>(), Err(Error::Unsupported(_))));
    }
}
