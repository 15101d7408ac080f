use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce one output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub params: Value,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, params: Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            params,
            inputs: Vec::new(),
        }
    }

    /// Reads `path` and records its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|_| Failure::Compute(format!("{}: not UTF-8 text", path.display())))
    }

    /// Sets a resolved parameter that was not given on the command line.
    pub fn resolve(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(map) = &mut self.params {
            map.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        }
    }
}

/// One table for CSV output, plus optional `# key {json}` header lines.
pub struct Table {
    pub comments: Vec<(String, Value)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            comments: Vec::new(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn comment(mut self, key: &str, value: impl Serialize) -> Self {
        self.comments.push((key.to_string(), serde_json::to_value(value).expect("serializable")));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

pub struct Sink {
    pub out: Option<PathBuf>,
    pub csv: bool,
}

impl Sink {
    fn emit(&self, bytes: &[u8]) -> Result<(), Failure> {
        match &self.out {
            Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(bytes)
                .map_err(|e| Failure::Compute(format!("stdout: {e}"))),
        }
    }

    /// JSON document `{manifest, result}`, or the CSV projection when `--csv`
    /// was given.
    pub fn write(&self, manifest: &RunManifest, result: &impl Serialize, table: impl FnOnce() -> Table) -> Result<(), Failure> {
        if self.csv {
            return self.emit(&render_csv(manifest, table())?);
        }
        let doc = serde_json::json!({ "manifest": manifest, "result": result });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Compute(e.to_string()))?;
        text.push('\n');
        self.emit(text.as_bytes())
    }

    /// Plain text body preceded by a `# manifest` comment line.
    pub fn write_text(&self, manifest: &RunManifest, body: &str) -> Result<(), Failure> {
        let mut text = manifest_line(manifest)?;
        text.push_str(body);
        self.emit(text.as_bytes())
    }
}

fn manifest_line(manifest: &RunManifest) -> Result<String, Failure> {
    let json = serde_json::to_string(manifest).map_err(|e| Failure::Compute(e.to_string()))?;
    Ok(format!("# manifest {json}\n"))
}

fn render_csv(manifest: &RunManifest, table: Table) -> Result<Vec<u8>, Failure> {
    let mut out = manifest_line(manifest)?.into_bytes();
    for (k, v) in &table.comments {
        out.extend(format!("# {k} {v}\n").into_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Failure::Compute(e.to_string());
    w.write_record(&table.header).map_err(fail)?;
    for r in &table.rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Failure::Compute(e.to_string()))
}
