//! Manifest and CSV emission. All floating-point values are printed with 17
//! significant digits (`{:.16e}`), in JSON manifests and CSV files alike.

use std::fmt::Write as _;
use std::io;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::ser::Formatter;
use serde_json::{Map, Value};

/// Render a float with 17 significant digits.
pub fn sig17(value: f64) -> String {
    format!("{value:.16e}")
}

/// JSON formatter that writes every f64 with 17 significant digits.
struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Reproducible record of one command invocation.
pub struct RunManifest {
    command: String,
    inputs: Map<String, Value>,
    outputs: Map<String, Value>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.to_string(), value.into());
        self
    }

    fn to_value(&self) -> Value {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default()
            .as_secs();
        serde_json::json!({
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "timestamp": timestamp.to_string(),
        })
    }

    /// Single JSON object on stdout, nothing else. A closed pipe is treated
    /// as success.
    pub fn print_json(&self) -> io::Result<()> {
        let stdout = io::stdout();
        let mut handle = stdout.lock();
        let mut ser = serde_json::Serializer::with_formatter(&mut handle, Sig17Formatter);
        match serde::Serialize::serialize(&self.to_value(), &mut ser) {
            Err(e) if e.io_error_kind() == Some(io::ErrorKind::BrokenPipe) => return Ok(()),
            Err(e) => return Err(io::Error::other(e)),
            Ok(()) => {}
        }
        use io::Write as _;
        match writeln!(handle) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => other,
        }
    }

    /// Human-readable key/value lines; ignores a closed pipe.
    pub fn print_text(&self) {
        use io::Write as _;
        let stdout = io::stdout();
        let mut handle = stdout.lock();
        for (key, value) in &self.outputs {
            if writeln!(handle, "{key} = {}", render(value)).is_err() {
                return;
            }
        }
    }
}

fn render(value: &Value) -> String {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => sig17(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Write a CSV file: header row, then rows of 17-significant-digit floats.
pub fn write_csv(path: &str, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| sig17(*v)).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    std::fs::write(path, text)
}
