use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

/// Top-level document shared by every command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub invariant_drift: Map<String, Value>,
    pub verdicts: Map<String, Value>,
}

impl Report {
    pub fn new(config: Value, columns: &[&str]) -> Self {
        Self {
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            invariant_drift: Map::new(),
            verdicts: Map::new(),
        }
    }

    pub fn verdict(&mut self, key: &str, value: impl Serialize) {
        self.verdicts.insert(key.into(), to_value(value));
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> io::Result<()> {
        with_sink(path, |out| match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                out.write_all(b"\n")
            }
        })
    }

    /// Comment lines carry config and verdicts as compact JSON, then the
    /// header row and the data.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# config: {}", self.config)?;
        for (k, v) in &self.verdicts {
            writeln!(out, "# {k}: {v}")?;
        }
        for (k, v) in &self.invariant_drift {
            writeln!(out, "# drift {k}: {v}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&number(*v));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// 17 significant digits, scientific notation.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

pub fn with_sink(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()
        }
    }
}

/// Largest |x − x0| / max(|x0|, 1) down each column.
pub fn drift(rows: &[Vec<f64>], col: usize) -> f64 {
    let Some(first) = rows.first().map(|r| r[col]) else {
        return 0.0;
    };
    let scale = first.abs().max(1.0);
    rows.iter()
        .map(|r| (r[col] - first).abs() / scale)
        .fold(0.0, f64::max)
}
