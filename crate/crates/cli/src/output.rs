use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A result in both renderings: a JSON value and a CSV table.
#[derive(Debug, Clone)]
pub struct Document {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Document {
    pub fn new(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Document {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn error(category: &str, code: &str, message: &str) -> Self {
        Document::new(
            json!({ "error": { "category": category, "code": code, "message": message } }),
            &["error", "code", "message"],
            vec![vec![category.into(), code.into(), message.into()]],
        )
    }

    pub fn json_text(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("serializable")
    }

    fn csv_text(&self) -> io::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }
}

pub fn emit(doc: &Document, format: Format, out: Option<&Path>) -> io::Result<()> {
    let text = match format {
        Format::Json => doc.json_text() + "\n",
        Format::Csv => doc.csv_text()?,
    };
    match out {
        Some(path) => File::create(path)?.write_all(text.as_bytes()),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
