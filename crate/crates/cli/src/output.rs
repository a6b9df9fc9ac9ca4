use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use qcpower_core::tolerances;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::Format;

/// Provenance block written at the top of every output.
#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub k_source: Option<String>,
    pub tolerances: Value,
}

impl Metadata {
    pub fn new(command: &'static str, config: Value) -> Self {
        Self {
            tool: "qcpower",
            version: qcpower_core::VERSION,
            command,
            config,
            seed: None,
            k_source: None,
            tolerances: json!({
                "algebra": tolerances::ALGEBRA,
                "eigen": tolerances::EIGEN,
                "degeneracy": tolerances::DEGENERACY,
                "leakage": tolerances::LEAKAGE,
                "pauli_coverage": tolerances::PAULI_COVERAGE,
            }),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn k_source(mut self, source: Option<String>) -> Self {
        self.k_source = source;
        self
    }
}

pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Write `data` as JSON, or as CSV produced by `csv_body` behind a
/// `# {metadata}` comment line.
pub fn emit<T, F>(path: Option<&Path>, format: Format, meta: &Metadata, data: &T, csv_body: F) -> Result<()>
where
    T: Serialize,
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let mut out = open(path)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &json!({ "metadata": meta, "data": data }))?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "# {}", serde_json::to_string(meta)?)?;
            csv_body(&mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}
