//! Collects one command's output in all three formats.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

pub struct Report {
    command: &'static str,
    pub json: Vec<Value>,
    pub csv: String,
    pub text: String,
}

impl Report {
    pub fn new(command: &'static str, csv_header: &str) -> Self {
        Report {
            command,
            json: Vec::new(),
            csv: format!("{csv_header}\n"),
            text: String::new(),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        if !s.as_ref().ends_with('\n') {
            self.text.push('\n');
        }
    }

    pub fn csv_row(&mut self, fields: &[String]) {
        let escaped: Vec<String> = fields
            .iter()
            .map(|f| {
                if f.contains([',', '"', '\n']) {
                    format!("\"{}\"", f.replace('"', "\"\""))
                } else {
                    f.clone()
                }
            })
            .collect();
        self.csv.push_str(&escaped.join(","));
        self.csv.push('\n');
    }

    pub fn json_text(&self) -> String {
        let doc = json!({ "command": self.command, "results": self.json });
        let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn csv_text(&self) -> String {
        self.csv.clone()
    }
}

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        format!("{:.*}", (11 - e).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

pub fn write(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}
