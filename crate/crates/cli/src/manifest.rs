//! Run manifests: one `<output>.manifest.json` next to the primary output of a run.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use o2hopf_core::RawParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

pub const SUFFIX: &str = ".manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Option<RawParams>,
    /// sha256 of the resolved configuration (params plus command options) as JSON.
    pub config_hash: String,
    pub tool_version: String,
    pub timestamp: String,
    /// Output files, relative to the manifest's directory.
    pub outputs: Vec<String>,
    /// Sweep rows already written; lets an interrupted sweep resume.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completed_rows: Option<usize>,
}

pub fn config_hash(config: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(SUFFIX);
    PathBuf::from(s)
}

fn relative_name(dir: &Path, file: &Path) -> String {
    let parent = file.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let same = match (std::fs::canonicalize(parent), std::fs::canonicalize(dir)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    match (same, file.file_name()) {
        (true, Some(name)) => name.to_string_lossy().into_owned(),
        _ => std::fs::canonicalize(file)
            .unwrap_or_else(|_| file.to_path_buf())
            .to_string_lossy()
            .into_owned(),
    }
}

impl RunManifest {
    pub fn new(command: &str, params: Option<RawParams>, config: &serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            params,
            config_hash: config_hash(config),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: Vec::new(),
            completed_rows: None,
        }
    }

    /// Write the manifest next to `files[0]`, listing every file.
    pub fn write(mut self, files: &[PathBuf]) -> Result<PathBuf, Failure> {
        let Some(primary) = files.first() else {
            return Err(Failure::runtime("manifest needs at least one output"));
        };
        let path = manifest_path(primary);
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        self.outputs = files.iter().map(|f| relative_name(dir, f)).collect();
        std::fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Output files in `dir` that are not referenced by exactly one manifest in `dir`.
pub fn unreferenced_outputs(dir: &Path) -> Result<Vec<String>, Failure> {
    let mut counts: HashMap<PathBuf, usize> = HashMap::new();
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if name.ends_with(SUFFIX) {
            let m = RunManifest::read(&path)
                .map_err(|e| Failure::Acceptance(format!("unreadable manifest {name}: {e}")))?;
            for out in m.outputs {
                let p = Path::new(&out);
                let full = if p.is_absolute() { p.to_path_buf() } else { dir.join(p) };
                let key = std::fs::canonicalize(&full).unwrap_or(full);
                *counts.entry(key).or_default() += 1;
            }
        } else {
            files.push(path);
        }
    }
    let mut bad = Vec::new();
    for f in files {
        let key = std::fs::canonicalize(&f).unwrap_or(f.clone());
        if counts.get(&key).copied().unwrap_or(0) != 1 {
            bad.push(f.display().to_string());
        }
    }
    bad.sort();
    Ok(bad)
}
