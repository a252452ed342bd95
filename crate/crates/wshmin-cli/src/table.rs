//! Rendering of tabular results with a metadata preamble.
//!
//! Every rendering is a pure function of its inputs, so a repeated run with
//! the same resolved arguments produces byte-identical output. Floats are
//! printed with `{:.16e}` (17 significant digits, exact round trip) in CSV;
//! JSON uses serde_json's shortest-round-trip form and maps non-finite
//! values to null.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

/// Ordered key-value preamble; every command emits at least version, the
/// resolved argument echo, the precision mode, and the sampler scheme id.
#[derive(Debug, Default, Clone)]
pub struct Meta {
    pairs: Vec<(String, String)>,
}

impl Meta {
    pub fn new() -> Self {
        Meta::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.pairs.push((key.to_string(), value.to_string()));
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<const K: usize>(columns: [&str; K], rows: Vec<Vec<Cell>>) -> Self {
        for row in &rows {
            assert_eq!(row.len(), K, "ragged table row");
        }
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

pub fn render(format: OutputFormat, meta: &Meta, table: &Table) -> String {
    match format {
        OutputFormat::Csv => render_csv(meta, table),
        OutputFormat::Json => render_json(meta, table),
    }
}

fn render_csv(meta: &Meta, table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in &meta.pairs {
        out.push_str("# ");
        out.push_str(k);
        out.push_str(": ");
        out.push_str(v);
        out.push('\n');
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(meta: &Meta, table: &Table) -> String {
    let mut meta_obj = Map::new();
    for (k, v) in &meta.pairs {
        meta_obj.insert(k.clone(), json!(v));
    }
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| Value::Array(row.iter().map(Cell::to_json).collect()))
        .collect();
    let doc = json!({
        "meta": Value::Object(meta_obj),
        "columns": table.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("static document shape");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Meta, Table) {
        let mut meta = Meta::new();
        meta.push("version", "0.0.0");
        meta.push("spec", "cdf --N 2");
        let table = Table::new(
            ["t", "F_N", "note"],
            vec![
                vec![Cell::Num(0.5), Cell::Num(1.0), Cell::Text("ok".into())],
                vec![Cell::Num(f64::NAN), Cell::Int(7), Cell::Flag(true)],
            ],
        );
        (meta, table)
    }

    #[test]
    fn csv_layout_is_exact() {
        let (meta, table) = sample();
        let text = render(OutputFormat::Csv, &meta, &table);
        let expect = "# version: 0.0.0\n\
                      # spec: cdf --N 2\n\
                      t,F_N,note\n\
                      5.0000000000000000e-1,1.0000000000000000e0,ok\n\
                      NaN,7,true\n";
        assert_eq!(text, expect);
    }

    #[test]
    fn json_round_trips_and_nan_becomes_null() {
        let (meta, table) = sample();
        let text = render(OutputFormat::Json, &meta, &table);
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["meta"]["version"], "0.0.0");
        assert_eq!(doc["columns"][2], "note");
        assert_eq!(doc["rows"][0][0], json!(0.5));
        assert!(doc["rows"][1][0].is_null());
        assert_eq!(doc["rows"][1][2], json!(true));
    }

    #[test]
    fn rendering_is_reproducible() {
        let (meta, table) = sample();
        for fmt in [OutputFormat::Csv, OutputFormat::Json] {
            assert_eq!(render(fmt, &meta, &table), render(fmt, &meta, &table));
        }
    }
}
