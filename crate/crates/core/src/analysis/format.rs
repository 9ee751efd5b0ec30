//! Percent formatting and the generic table model behind every report.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// How a percentage is rounded and printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PercentStyle {
    /// Round half up to `decimals`, then drop trailing zeros ("75", "72.7").
    RoundTrim(u32),
    /// Round half up to exactly `decimals` ("50.00").
    RoundFixed(u32),
    /// Truncate to `decimals`, keeping them all ("72.9").
    TruncFixed(u32),
    /// Truncate to `decimals`, then drop trailing zeros ("32.25", "25").
    TruncTrim(u32),
}

/// `100 * n / d` formatted without a percent sign. `d == 0` prints as 0.
pub fn percent(n: usize, d: usize, style: PercentStyle) -> String {
    let (decimals, round, trim) = match style {
        PercentStyle::RoundTrim(k) => (k, true, true),
        PercentStyle::RoundFixed(k) => (k, true, false),
        PercentStyle::TruncFixed(k) => (k, false, false),
        PercentStyle::TruncTrim(k) => (k, false, true),
    };
    let scale = 10u128.pow(decimals);
    let value = if d == 0 {
        0
    } else {
        let num = n as u128 * 100 * scale;
        let den = d as u128;
        if round {
            (2 * num + den) / (2 * den)
        } else {
            num / den
        }
    };
    let whole = value / scale;
    let frac = value % scale;
    let mut s = whole.to_string();
    if decimals > 0 {
        let mut digits = format!("{frac:0width$}", width = decimals as usize);
        if trim {
            while digits.ends_with('0') {
                digits.pop();
            }
        }
        if !digits.is_empty() {
            s.push('.');
            s.push_str(&digits);
        }
    }
    s
}

/// A rendered table: a header row and string cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    /// Stable machine name, used as the first CSV column.
    pub id: String,
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(id: impl Into<String>, title: impl Into<String>, header: &[&str]) -> Self {
        Table {
            id: id.into(),
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(id: impl Into<String>, title: impl Into<String>, header: Vec<String>) -> Self {
        Table {
            id: id.into(),
            title: title.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "## {}\n", self.title);
        let _ = writeln!(out, "| {} |", self.header.join(" | "));
        let rule: Vec<&str> = self
            .header
            .iter()
            .enumerate()
            .map(|(i, _)| if i == 0 { "---" } else { "---:" })
            .collect();
        let _ = writeln!(out, "| {} |", rule.join(" | "));
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }

    /// Cells as `(row label, column header, value)` triples.
    pub fn cells(&self) -> Vec<CsvCell> {
        let mut out = Vec::new();
        for row in &self.rows {
            for (col, value) in self.header.iter().zip(row).skip(1) {
                out.push(CsvCell {
                    table: self.id.clone(),
                    row: row[0].clone(),
                    column: col.clone(),
                    value: value.clone(),
                });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported report format `{0}`; use markdown or csv")]
pub struct UnsupportedFormat(pub String);

impl FromStr for ReportFormat {
    type Err = UnsupportedFormat;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(UnsupportedFormat(other.to_string())),
        }
    }
}

/// One long-format CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvCell {
    pub table: String,
    pub row: String,
    pub column: String,
    pub value: String,
}

pub(crate) const MARKDOWN_TITLE: &str = "# Consistency report\n";

/// Renders tables as one markdown document.
pub fn tables_to_markdown(tables: &[Table]) -> String {
    let mut out = String::from(MARKDOWN_TITLE);
    for t in tables {
        out.push('\n');
        out.push_str(&t.to_markdown());
    }
    out
}

/// Renders tables as long-format CSV: `table,row,column,value`.
pub fn tables_to_csv(tables: &[Table]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["table", "row", "column", "value"])
        .expect("in-memory write");
    for t in tables {
        for cell in t.cells() {
            w.serialize((&cell.table, &cell.row, &cell.column, &cell.value))
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Parses long-format CSV back into cells.
pub fn parse_csv(text: &str) -> Result<Vec<CsvCell>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}
