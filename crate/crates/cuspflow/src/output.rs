//! Tables rendered as CSV or JSON with 12 significant digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::config::Format;
use cuspflow_core::Cusp;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(BigInt),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v.into())
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<BigInt> for Cell {
    fn from(v: BigInt) -> Self {
        Cell::Int(v)
    }
}

impl From<&BigInt> for Cell {
    fn from(v: &BigInt) -> Self {
        Cell::Int(v.clone())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

impl From<&Cusp> for Cell {
    fn from(c: &Cusp) -> Self {
        Cell::Text(c.to_string())
    }
}

impl From<&BigRational> for Cell {
    fn from(r: &BigRational) -> Self {
        Cell::Text(rational(r))
    }
}

/// `p/q`, or `p` for integers.
pub fn rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal with 12 significant digits, trailing zeros dropped.
pub fn float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.11e}");
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A float as a JSON number carrying the printed digits.
pub fn json_float(v: f64) -> Value {
    match float(v).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(float(v)),
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(v) => float(*v),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Float(v) => json_float(*v),
            Cell::Int(n) => match i64::try_from(n) {
                Ok(i) => Value::from(i),
                Err(_) => Value::String(n.to_string()),
            },
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|c| csv_field(&c.text())).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> =
                        self.columns.iter().zip(r).map(|(k, c)| (k.to_string(), c.json())).collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => pretty(&self.json_value()),
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_twelve_digits() {
        assert_eq!(float(1.0 / 3.0), "0.333333333333");
        assert_eq!(float(2.5), "2.5");
        assert_eq!(float(-1234567.891), "-1234567.891");
        assert_eq!(float(1e-300), "1e-300");
        assert_eq!(float(6.02214076e23), "6.02214076e23");
        assert_eq!(float(0.0), "0");
    }

    #[test]
    fn csv_and_json_share_field_names() {
        let mut t = Table::new(&["p", "q", "v"]);
        t.push(vec![Cell::from(2u64), Cell::from(7u64), Cell::from(0.5)]);
        assert_eq!(t.csv(), "p,q,v\n2,7,0.5\n");
        let j = t.json_value();
        assert_eq!(j[0]["q"], 7);
        assert_eq!(j[0]["v"], 0.5);
        assert_eq!(rational(&BigRational::new(4.into(), 6.into())), "2/3");
    }
}
