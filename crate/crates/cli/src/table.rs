use std::io::{self, Write};

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(&'static str),
}

/// 17 significant digits, enough to round-trip any double.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => (*s).to_owned(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::Number(format_number(*x).parse::<Number>().expect("valid number")),
            Cell::Num(_) => Value::Null,
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::from(*s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()
    }

    fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| ((*c).to_owned(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *out, &rows)?;
        out.write_all(b"\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["k", "gamma", "status"]);
        t.push(vec![Cell::Num(1.0), Cell::Num(9.790617920627948e-5), Cell::Text("ok")]);
        t.push(vec![Cell::Num(0.0), Cell::Num(f64::NAN), Cell::Text("degenerate_mode")]);
        t
    }

    #[test]
    fn numbers_round_trip() {
        for &x in &[9.790617920627948e-5, 1.0 / 3.0, -2.5e300, 5e-324, 0.0] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,gamma,status\n1.0000000000000000e0,9.7906179206279476e-5,ok\n0.0000000000000000e0,NaN,degenerate_mode\n"
        );
    }

    #[test]
    fn json_keeps_digits_and_nulls_nan() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"gamma\": 9.7906179206279476e-5"));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[1]["gamma"], Value::Null);
        assert_eq!(v[1]["status"], "degenerate_mode");
    }
}
