//! JSON and CSV emission.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

pub const SCHEMA: &str = "odeim/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn cx(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn cxs<'a>(zs: impl IntoIterator<Item = &'a C64>) -> Value {
    Value::Array(zs.into_iter().map(|z| cx(*z)).collect())
}

/// Result of a command: JSON document, CSV table and threshold verdict.
pub struct Report {
    pub command: &'static str,
    pub body: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub passed: bool,
}

impl Report {
    pub fn json(&self) -> Value {
        let mut doc = json!({ "schema": SCHEMA, "command": self.command, "passed": self.passed });
        if let (Value::Object(out), Value::Object(body)) = (&mut doc, &self.body) {
            for (k, v) in body {
                out.insert(k.clone(), v.clone());
            }
        }
        doc
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> io::Result<()> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            Format::Json => {
                let mut sink = sink;
                serde_json::to_writer_pretty(&mut sink, &self.json())?;
                writeln!(sink)?;
                sink.flush()
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(sink);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}
