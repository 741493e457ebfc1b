//! Encoding and writing of command output.
//!
//! Computed values are written in the shortest form that parses back to
//! the same `f64` (`{:?}`, always with a decimal point or exponent), so CSV
//! and JSON round-trip exactly. Inputs echoed back (times, lags) keep their
//! plain `Display` form.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::CliError;

/// Version tag of every JSON document; matches `schemas/v1`.
pub const SCHEMA_VERSION: &str = "1";

/// A computed value, round-trip exact.
pub fn value(x: f64) -> String {
    format!("{x:?}")
}

/// An input echoed back.
pub fn input(x: f64) -> String {
    x.to_string()
}

pub fn json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Numerical(format!("cannot encode output as JSON: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// CSV document: optional `# key: value` metadata lines, a header and
/// records.
pub struct CsvDoc {
    meta: Vec<(String, String)>,
    writer: csv::Writer<Vec<u8>>,
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Self { meta: Vec::new(), writer }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self) -> String {
        let body = self.writer.into_inner().expect("writing to memory");
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&String::from_utf8(body).expect("CSV fields are UTF-8"));
        out
    }
}

/// Writes `body` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| CliError::Validation(format!("cannot write to standard output: {e}")))
        }
    }
}
