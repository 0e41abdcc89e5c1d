//! CSV and JSON sinks.

use kl_strip::{Error, Result, C64};
use std::io::Write;
use std::path::Path;

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// A CSV table assembled in memory, written in one go.
#[derive(Debug, Clone)]
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { lines: vec![header.join(",")] }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.lines.push(cells.join(","));
    }

    pub fn n_rows(&self) -> usize {
        self.lines.len() - 1
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

pub fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `[re, im]`.
pub fn complex(z: C64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

pub fn complex_list(v: &[C64]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(|&z| complex(z)).collect())
}
