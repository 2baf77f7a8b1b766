//! Record tables and their CSV / JSON-lines rendering.

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    JsonLines,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    List(Vec<usize>),
    Null,
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Str(x.to_string())
    }
}
impl From<Vec<usize>> for Cell {
    fn from(x: Vec<usize>) -> Self {
        Cell::List(x)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Float(x) => format!("{x:?}"),
            Cell::Bool(x) => x.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::List(v) => v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(x) => Value::from(*x),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Bool(x) => Value::Bool(*x),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::List(v) => Value::from(v.clone()),
            Cell::Null => Value::Null,
        }
    }
}

/// Rows of one record kind sharing a column layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub record: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(record: &'static str, columns: &[&'static str]) -> Self {
        Self { record, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.record);
        self.rows.push(row);
    }
}

/// Build a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::output::Cell::from($x)),*]
    };
}

pub fn render(tables: &[Table], format: Format) -> String {
    match format {
        Format::Csv => render_csv(tables),
        Format::JsonLines => render_json_lines(tables),
    }
}

fn render_csv(tables: &[Table]) -> String {
    let mut blocks = Vec::new();
    for t in tables {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec!["record"];
        header.extend(t.columns.iter());
        w.write_record(&header).expect("in-memory write");
        for row in &t.rows {
            let mut fields = vec![t.record.to_string()];
            fields.extend(row.iter().map(Cell::csv));
            w.write_record(&fields).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        blocks.push(String::from_utf8(bytes).expect("utf-8 fields"));
    }
    blocks.join("\n")
}

fn render_json_lines(tables: &[Table]) -> String {
    let mut out = String::new();
    for t in tables {
        for row in &t.rows {
            out.push_str("{\"record\":");
            out.push_str(&Value::String(t.record.to_string()).to_string());
            for (col, cell) in t.columns.iter().zip(row) {
                out.push(',');
                out.push_str(&Value::String(col.to_string()).to_string());
                out.push(':');
                out.push_str(&cell.json().to_string());
            }
            out.push_str("}\n");
        }
    }
    out
}
