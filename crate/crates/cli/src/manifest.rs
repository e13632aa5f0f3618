//! Run manifests and output writing.

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Description of one invocation, written beside every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub config_paths: Vec<String>,
    pub parameters: Value,
    /// SHA-256 over the parameters and every input file.
    pub input_sha256: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: Value, inputs: &[(PathBuf, Vec<u8>)]) -> Self {
        let mut h = Sha256::new();
        h.update(subcommand.as_bytes());
        h.update(parameters.to_string().as_bytes());
        for (path, bytes) in inputs {
            h.update(path.to_string_lossy().as_bytes());
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        RunManifest {
            subcommand: subcommand.to_string(),
            tool_version: ris_core::formats::TOOL.to_string(),
            config_paths: inputs.iter().map(|(p, _)| p.display().to_string()).collect(),
            parameters,
            input_sha256: hex::encode(h.finalize()),
        }
    }
}

pub fn read_input(path: &Path) -> Result<(PathBuf, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok((path.to_path_buf(), bytes))
}

pub fn read_text(input: &(PathBuf, Vec<u8>)) -> Result<&str> {
    std::str::from_utf8(&input.1).with_context(|| format!("{} is not UTF-8", input.0.display()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn check_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            bail!("output directory does not exist: {}", parent.display());
        }
    }
    Ok(())
}

/// Writes `contents` to `path` and the manifest to `<path>.manifest.json`.
pub fn write_output(path: &Path, contents: &str, manifest: &RunManifest) -> Result<()> {
    check_parent(path)?;
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    let m = serde_json::to_string_pretty(manifest)? + "\n";
    let mp = manifest_path(path);
    std::fs::write(&mp, m).with_context(|| format!("cannot write {}", mp.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}
