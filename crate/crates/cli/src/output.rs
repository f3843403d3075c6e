use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(fmt_f64(*v))),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
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
        Cell::Int(v as u64)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

/// Shortest round-trip decimal; `inf`, `-inf`, `nan` for the rest.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

/// One output row: ordered `(column, value)` pairs.
pub type Record = Vec<(&'static str, Cell)>;

fn csv_io(e: csv::Error) -> io::Error {
    if let csv::ErrorKind::Io(_) = e.kind() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return io;
        }
        unreachable!()
    }
    io::Error::other(e)
}

pub fn write_records(records: &[Record], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.iter().map(|(k, _)| *k))
                    .map_err(csv_io)?;
            }
            for r in records {
                w.write_record(r.iter().map(|(_, c)| c.csv_field()))
                    .map_err(csv_io)?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|r| {
                    Value::Object(
                        r.iter()
                            .map(|(k, c)| (k.to_string(), c.json_value()))
                            .collect::<Map<_, _>>(),
                    )
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)
        }
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(records: &[Record], format: Format, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            write_records(records, format, &mut f)?;
            f.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_records(records, format, &mut lock)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(records: &[Record], format: Format) -> String {
        let mut buf = Vec::new();
        write_records(records, format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_has_header_and_plain_decimals() {
        let rows = vec![
            vec![
                ("q", Cell::from(0.1)),
                ("label", Cell::from("a,b")),
                ("n", Cell::from(3usize)),
            ],
            vec![
                ("q", Cell::from(f64::INFINITY)),
                ("label", Cell::Empty),
                ("n", Cell::from(4usize)),
            ],
        ];
        assert_eq!(
            render(&rows, Format::Csv),
            "q,label,n\n0.1,\"a,b\",3\ninf,,4\n"
        );
    }

    #[test]
    fn json_is_array_of_flat_records() {
        let rows = vec![vec![
            ("q", Cell::from(f64::INFINITY)),
            ("s", Cell::from(-1.0)),
            ("ok", Cell::from(true)),
        ]];
        let v: Value = serde_json::from_str(&render(&rows, Format::Json)).unwrap();
        assert_eq!(v, serde_json::json!([{"q": "inf", "s": -1.0, "ok": true}]));
    }

    #[test]
    fn shortest_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456.789] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
