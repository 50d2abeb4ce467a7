use clap::ValueEnum;
use rug::{Integer, Rational};
use serde_json::{Map, Value};
use std::io::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Floats are printed with this many significant digits.
const FLOAT_DIGITS: usize = 10;
/// Decimal expansion of rationals.
const RATIONAL_DIGITS: usize = 15;

pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

/// One output value. Floats are rounded once, here, so that both formats
/// carry the same number.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Big(Integer),
    Float(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn float(x: f64) -> Cell {
        Cell::Float(sig(x, FLOAT_DIGITS).parse().unwrap_or(x))
    }

    pub fn ratio(r: &Rational) -> [Cell; 3] {
        [
            Cell::Big(r.numer().clone()),
            Cell::Big(r.denom().clone()),
            Cell::Text(sig(r.to_f64(), RATIONAL_DIGITS)),
        ]
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Big(i) => i.to_string(),
            Cell::Float(x) => sig(*x, FLOAT_DIGITS),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Big(i) => match i.to_i64() {
                Some(v) => Value::from(v),
                None => Value::String(i.to_string()),
            },
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "# {}", self.columns.join(","))?;
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&Value::Array(rows))?)
            }
        }
    }
}

/// Rounds every float in a JSON document to the printed precision.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            match Cell::float(x) {
                Cell::Float(r) => serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number),
                _ => unreachable!(),
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}
