//! Output plumbing shared by every subcommand: 12-significant-digit
//! number formatting, CSV assembly, and the stdout-or-file sink.

use std::fs;
use std::path::Path;

/// Render with 12 significant digits (11 decimals in scientific
/// notation), locale-independent.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Round to 12 significant digits for JSON emission, so the two formats
/// carry identical values.
pub fn sig12(x: f64) -> f64 {
    fmt12(x).parse().expect("formatted float always parses")
}

/// A CSV document under construction; every cell is pre-rendered.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            lines: vec![header.to_string()],
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Serialize a JSON value with a trailing newline. Keys are emitted in
/// sorted order, so reruns are byte-identical.
pub fn json_doc(value: &serde_json::Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("in-memory JSON never fails");
    out.push('\n');
    out
}

/// Write to the given path, or to stdout when no path was requested.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
