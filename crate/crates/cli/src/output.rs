//! Output writers, error reports and per-command manifests.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(path)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        entries.sort();
        for e in entries {
            hasher.update(e.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
            hasher.update(sha256_file(&e)?);
        }
    } else {
        let mut f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let mut buf = [0u8; 64 * 1024];
        loop {
            let n = f.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
        }
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// Tracks the outputs and inputs of one subcommand.
pub struct Run {
    pub command: String,
    pub out_dir: PathBuf,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    errors: Vec<ErrorEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorEntry {
    pub stage: String,
    pub ad_id: Option<String>,
    pub message: String,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool_version: &'a str,
    timestamp_unix: u64,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    partial: bool,
    config: &'a serde_json::Value,
}

impl Run {
    pub fn new(command: &str, out_dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
        Ok(Run {
            command: command.into(),
            out_dir: out_dir.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            errors: Vec::new(),
        })
    }

    pub fn input(&mut self, p: &Path) {
        if !self.inputs.iter().any(|q| q == p) {
            self.inputs.push(p.into());
        }
    }

    pub fn error(&mut self, stage: &str, ad_id: Option<&str>, message: impl Into<String>) {
        self.errors.push(ErrorEntry { stage: stage.into(), ad_id: ad_id.map(str::to_string), message: message.into() });
    }

    pub fn error_count(&self) -> usize {
        self.errors.len()
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }

    fn register(&mut self, name: &str) -> anyhow::Result<BufWriter<File>> {
        let path = self.out_dir.join(name);
        self.outputs.push(path.clone());
        let f = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
        let mut w = self.register(name)?;
        for r in rows {
            serde_json::to_writer(&mut w, &r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut w = self.register(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> anyhow::Result<()> {
        let mut w = self.register(name)?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Write errors_<command>.json (if any) and the manifest. Returns whether errors occurred.
    pub fn finish(mut self, config: &serde_json::Value) -> anyhow::Result<bool> {
        let partial = self.has_errors();
        if partial {
            let errors = std::mem::take(&mut self.errors);
            let name = format!("errors_{}.json", self.command.replace(' ', "_"));
            self.write_json(&name, &errors)?;
        }
        let mut inputs = Vec::with_capacity(self.inputs.len());
        for p in &self.inputs {
            inputs.push(InputDigest { path: p.display().to_string(), sha256: sha256_file(p)? });
        }
        let manifest = Manifest {
            command: &self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            inputs,
            outputs: self
                .outputs
                .iter()
                .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
                .collect(),
            partial,
            config,
        };
        let path = self.out_dir.join(format!("manifest_{}.json", self.command.replace(' ', "_")));
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("cannot write {}", path.display()))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(partial)
    }
}
