use std::io::Write;

use serde_json::{json, Map, Value};

use ntkit::json::SCHEMA_VERSION;
use ntkit::ntheory::PRIMALITY_SEED;

/// Head line of every output stream. `--jobs` is deliberately absent from
/// `params` so the worker count never changes output bytes.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub params: Map<String, Value>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, timestamp: String) -> Self {
        RunManifest { command: command.to_string(), params: Map::new(), timestamp }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "kind": "manifest",
            "command": self.command,
            "params": Value::Object(self.params.clone()),
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": self.timestamp,
            "seed": format!("{PRIMALITY_SEED:#018x}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Writes the manifest first, then records, in the chosen format.
pub struct Emitter<W: Write> {
    out: W,
    format: Format,
}

impl<W: Write> Emitter<W> {
    pub fn new(out: W, format: Format, manifest: &RunManifest) -> std::io::Result<Self> {
        let mut e = Emitter { out, format };
        match format {
            Format::Json => writeln!(e.out, "{}", manifest.to_json())?,
            Format::Csv => writeln!(e.out, "# {}", manifest.to_json())?,
        }
        Ok(e)
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn record(&mut self, v: &Value) -> std::io::Result<()> {
        writeln!(self.out, "{v}")
    }

    pub fn csv_row<S: AsRef<str>>(&mut self, cells: &[S]) -> std::io::Result<()> {
        let line: Vec<String> = cells.iter().map(|c| csv_escape(c.as_ref())).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_heads_both_formats() {
        let mut m = RunManifest::new("pell", "2024-01-01T00:00:00Z".into());
        m.param("a", 2);
        let mut buf = Vec::new();
        Emitter::new(&mut buf, Format::Csv, &m).unwrap().csv_row(&["x", "a,b"]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let head = lines.next().unwrap();
        assert!(head.starts_with("# {"));
        let v: Value = serde_json::from_str(&head[2..]).unwrap();
        assert_eq!(v["command"], json!("pell"));
        assert_eq!(v["params"]["a"], json!(2));
        assert_eq!(lines.next(), Some("x,\"a,b\""));
    }
}
