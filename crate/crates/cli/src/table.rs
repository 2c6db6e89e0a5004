//! Result tables and their CSV / JSON encodings.
//!
//! CSV output starts with `#` lines that carry the table name, one line per
//! column (`# column: name | kind | unit`) and summary entries
//! (`# summary: key | value`), followed by an ordinary header row and data.
//! JSON output holds the same fields. Floats are written in the shortest form
//! that parses back to the same bits, so both encodings round-trip exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Int,
    Num,
    Text,
}

impl ColumnKind {
    fn name(self) -> &'static str {
        match self {
            ColumnKind::Int => "int",
            ColumnKind::Num => "num",
            ColumnKind::Text => "text",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "int" => Some(ColumnKind::Int),
            "num" => Some(ColumnKind::Num),
            "text" => Some(ColumnKind::Text),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, kind: ColumnKind, unit: &str) -> Self {
        Self {
            name: name.into(),
            kind,
            unit: unit.into(),
        }
    }
}

/// A table cell. Numeric columns may hold a text marker (for example
/// `divergent`) where no number exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => write!(f, "{v:?}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn parse(raw: &str, kind: ColumnKind) -> Self {
        match kind {
            ColumnKind::Int => raw.parse().map(Cell::Int).unwrap_or_else(|_| Cell::text(raw)),
            ColumnKind::Num => raw.parse().map(Cell::Num).unwrap_or_else(|_| Cell::text(raw)),
            ColumnKind::Text => Cell::text(raw),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub table: String,
    pub columns: Vec<Column>,
    pub summary: Vec<SummaryEntry>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Self {
            table: name.into(),
            columns,
            summary: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push(SummaryEntry {
            key: key.into(),
            value: value.into().to_string(),
        });
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.value.as_str())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of a column, `None` where the cell is a text marker.
    pub fn column_values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn encode(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn decode(text: &str, format: Format) -> Result<Self, CliError> {
        match format {
            Format::Csv => Self::from_csv(text),
            Format::Json => Self::from_json(text),
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = format!("# table: {}\n", self.table);
        for c in &self.columns {
            out.push_str(&format!("# column: {} | {} | {}\n", c.name, c.kind.name(), c.unit));
        }
        for e in &self.summary {
            out.push_str(&format!("# summary: {} | {}\n", e.key, e.value));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
        writer
            .write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::to_string))
                .map_err(csv_err)?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| CliError::Io(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::Validation(format!("table: {msg}"));
        let mut name = None;
        let mut columns = Vec::new();
        let mut summary = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(meta) = line.strip_prefix("# ") else {
                break;
            };
            body_start += line.len();
            let meta = meta.trim_end_matches(['\n', '\r']);
            if let Some(v) = meta.strip_prefix("table: ") {
                name = Some(v.to_string());
            } else if let Some(v) = meta.strip_prefix("column: ") {
                let parts: Vec<&str> = v.splitn(3, " | ").collect();
                let [cname, kind, unit] = parts[..] else {
                    return Err(bad(format!("malformed column line {meta:?}")));
                };
                let kind = ColumnKind::parse(kind)
                    .ok_or_else(|| bad(format!("unknown column kind {kind:?}")))?;
                columns.push(Column::new(cname, kind, unit));
            } else if let Some(v) = meta.strip_prefix("summary: ") {
                let (key, value) = v
                    .split_once(" | ")
                    .ok_or_else(|| bad(format!("malformed summary line {meta:?}")))?;
                summary.push(SummaryEntry {
                    key: key.into(),
                    value: value.into(),
                });
            } else {
                return Err(bad(format!("unknown header line {meta:?}")));
            }
        }
        let name = name.ok_or_else(|| bad("missing '# table:' line".into()))?;

        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[body_start..]);
        let header = reader
            .headers()
            .map_err(|e| bad(format!("csv header: {e}")))?
            .clone();
        if header.iter().ne(columns.iter().map(|c| c.name.as_str())) {
            return Err(bad("header row does not match the column lines".into()));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(format!("csv row: {e}")))?;
            if record.len() != columns.len() {
                return Err(bad(format!("row has {} fields, expected {}", record.len(), columns.len())));
            }
            rows.push(
                record
                    .iter()
                    .zip(&columns)
                    .map(|(raw, c)| Cell::parse(raw, c.kind))
                    .collect(),
            );
        }
        Ok(Self {
            table: name,
            columns,
            summary,
            rows,
        })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("json: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let table: Table = serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("table: json: {e}")))?;
        if let Some(row) = table.rows.iter().find(|r| r.len() != table.columns.len()) {
            return Err(CliError::Validation(format!(
                "table: row has {} fields, expected {}",
                row.len(),
                table.columns.len()
            )));
        }
        Ok(table)
    }
}
