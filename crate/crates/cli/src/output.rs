//! Report rendering. Floats are written at full precision so a state or
//! frame from one command can be fed back into another.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "text-table" | "table" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (json, csv, text-table)")),
        }
    }
}

/// A flat table: the row form behind CSV and the aligned text layout.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = self.rows.iter().map(|r| r.iter().map(Self::cell).collect::<Vec<_>>());
        for r in std::iter::once(self.header.clone()).chain(rows) {
            w.write_record(&r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("UTF-8 cells")
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Self::cell).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([self.header[c].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&cells) {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

/// What a command produces: the JSON document, its flat table, and an
/// optional hand-laid text rendering that replaces the generic one.
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub text: Option<String>,
}

impl Report {
    pub fn render(self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv(),
            Format::Text => self.text.unwrap_or_else(|| self.table.to_text()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_quoting_and_text() {
        let mut t = Table::new(&["member", "value"]);
        t.push(vec![json!("Xij(1,2)@n=3"), json!(0.125)]);
        assert_eq!(t.to_csv(), "member,value\n\"Xij(1,2)@n=3\",0.125\n");
        assert!(t.to_text().starts_with("member        value\n"));
    }
}
