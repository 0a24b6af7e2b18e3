//! CSV and JSON rendering at a fixed number of significant digits.

use serde::Serialize;
use serde_json::Value;

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Shortest round-trip text of `x` after rounding to `digits` significant
/// digits; scientific notation outside `1e−5 ≤ |x| < 1e16`.
pub fn format_float(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x, digits);
    if r == 0.0 {
        return "0".into();
    }
    let exp = r.abs().log10().floor();
    if (-5.0..16.0).contains(&exp) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// A table with one header row, rendered as CSV or as a JSON array of
/// objects.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(x) => format_float(*x, digits),
                    Cell::Int(i) => i.to_string(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, digits: usize) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let v = match c {
                            Cell::Float(x) => float_value(*x, digits),
                            Cell::Int(i) => Value::from(*i),
                            Cell::Bool(b) => Value::from(*b),
                            Cell::Text(s) => Value::from(s.as_str()),
                        };
                        (k.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = Value::Array(rows).to_string();
        s.push('\n');
        s
    }
}

fn float_value(x: f64, digits: usize) -> Value {
    serde_json::Number::from_f64(round_sig(x, digits)).map_or(Value::Null, Value::Number)
}

fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = float_value(x, digits);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_value(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_value(x, digits)),
        _ => {}
    }
}

/// One JSON object per line with every float rounded to `digits`.
pub fn to_json_line<T: Serialize>(value: &T, digits: usize) -> String {
    let mut v = serde_json::to_value(value).unwrap_or(Value::Null);
    round_value(&mut v, digits);
    let mut s = v.to_string();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering() {
        assert_eq!(format_float(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_float(1.0, 12), "1");
        assert_eq!(format_float(-2.5, 12), "-2.5");
        assert_eq!(format_float(123456.789, 4), "123500");
        assert_eq!(format_float(1.23456e-7, 3), "1.23e-7");
        assert_eq!(format_float(1e20, 12), "1e20");
        assert_eq!(format_float(0.0, 12), "0");
        assert_eq!(format_float(f64::NAN, 12), "NaN");
        assert_eq!(format_float(0.599061, 3), "0.599");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["x", "label"]);
        t.push(vec![1.5.into(), "a".into()]);
        t.push(vec![(-0.25).into(), "b".into()]);
        assert_eq!(t.to_csv(12), "x,label\n1.5,a\n-0.25,b\n");
    }

    #[test]
    fn json_rounding() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            n: usize,
            y: Option<f64>,
        }
        let s = to_json_line(&S { x: 1.0 / 3.0, n: 3, y: None }, 4);
        assert_eq!(s, "{\"n\":3,\"x\":0.3333,\"y\":null}\n");
    }
}
