//! Plain-text tables, CSV and the JSON report envelope.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { title: None, header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Left-aligned columns separated by two spaces, trailing blanks trimmed.
    pub fn to_text(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).chain([self.header.len()]).max().unwrap_or(0);
        let mut width = vec![0usize; cols];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (i, cell) in row.iter().enumerate() {
                width[i] = width[i].max(cell.chars().count());
            }
        }
        let mut out = String::new();
        if let Some(t) = &self.title {
            out.push_str(t);
            out.push('\n');
        }
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', width[i] - cell.chars().count()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidValue(format!("csv output failed: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidValue(format!("csv output failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Envelope of every JSON result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    /// Ring the computation ran in, in display form ("Z/7", "Q(sqrt(2))").
    pub ring: Option<String>,
    pub result: Value,
}

/// What a command produced, renderable in each output format.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub report: Report,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
}

impl Rendered {
    pub fn new(command: &str, ring: Option<String>, result: Value) -> Self {
        Rendered { report: Report { command: command.into(), ring, result }, notes: Vec::new(), tables: Vec::new() }
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }

    pub fn table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Table => {
                let mut parts: Vec<String> = Vec::new();
                if !self.notes.is_empty() {
                    parts.push(self.notes.iter().map(|n| format!("{n}\n")).collect());
                }
                parts.extend(self.tables.iter().map(Table::to_text));
                Ok(parts.join("\n"))
            }
            Format::Csv => {
                if self.tables.is_empty() {
                    return Ok(self.notes.iter().map(|n| format!("# {n}\n")).collect());
                }
                let mut parts = Vec::new();
                for t in &self.tables {
                    parts.push(t.to_csv()?);
                }
                Ok(parts.join("\n"))
            }
        }
    }
}
