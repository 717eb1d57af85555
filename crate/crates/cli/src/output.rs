//! Tabular output in the three supported formats.
//!
//! A [`Section`] is a named table. Plain text prints every section with its
//! title and aligned columns; CSV prints the first (primary) section only;
//! records print one JSON object per row, keys in column order, tagged with
//! the section name under `"record"`.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Records,
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: &'static str,
    pub title: Option<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Leading columns blanked in plain text while they repeat the row above.
    pub collapse: usize,
}

impl Section {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Section {
            name,
            title: None,
            columns: columns.to_vec(),
            rows: Vec::new(),
            collapse: 0,
        }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn collapsing(mut self, leading: usize) -> Self {
        self.collapse = leading;
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand prints to standard output.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub sections: Vec<Section>,
    /// Free-form lines printed after the tables in plain-text mode.
    pub notes: Vec<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Csv => self.sections.first().map(to_csv).unwrap_or_default(),
            Format::Records => self.to_records(),
        }
    }

    fn to_table(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if let Some(t) = &s.title {
                let _ = writeln!(out, "{t}");
            }
            out.push_str(&aligned(s));
        }
        if !self.notes.is_empty() {
            if !self.sections.is_empty() {
                out.push('\n');
            }
            for n in &self.notes {
                let _ = writeln!(out, "{n}");
            }
        }
        out
    }

    fn to_records(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            for row in &s.rows {
                out.push_str("{\"record\":");
                out.push_str(&Value::from(s.name).to_string());
                for (col, v) in s.columns.iter().zip(row) {
                    out.push(',');
                    out.push_str(&Value::from(*col).to_string());
                    out.push(':');
                    out.push_str(&v.to_string());
                }
                out.push_str("}\n");
            }
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn aligned(s: &Section) -> String {
    let mut cells: Vec<Vec<String>> = s.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
    for i in (1..s.rows.len()).rev() {
        let lead = s.collapse.min(s.columns.len());
        if s.rows[i][..lead] == s.rows[i - 1][..lead] {
            cells[i][..lead].iter_mut().for_each(String::clear);
        }
    }
    let mut widths: Vec<usize> = s.columns.iter().map(|c| c.chars().count()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    // numeric columns are right-aligned
    let numeric: Vec<bool> = (0..s.columns.len())
        .map(|i| s.rows.iter().all(|r| matches!(r[i], Value::Number(_) | Value::Null)) && !s.rows.is_empty())
        .collect();
    let line = |items: &[String]| {
        let mut l = String::new();
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                l.push_str("  ");
            }
            let pad = " ".repeat(widths[i] - item.chars().count());
            if numeric[i] {
                l.push_str(&pad);
                l.push_str(item);
            } else {
                l.push_str(item);
                l.push_str(&pad);
            }
        }
        let mut l = l.trim_end().to_string();
        l.push('\n');
        l
    };
    let header: Vec<String> = s.columns.iter().map(|c| c.to_string()).collect();
    let mut out = line(&header);
    for row in &cells {
        out.push_str(&line(row));
    }
    out
}

fn to_csv(s: &Section) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(&s.columns)?;
        for row in &s.rows {
            w.write_record(row.iter().map(|v| match v {
                Value::Null => String::new(),
                other => plain(other),
            }))?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8 fields")
}
