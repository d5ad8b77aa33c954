//! Output writing and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{Artifact, RunError};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
struct Entry<'a> {
    file: &'a str,
    bytes: usize,
    sha256: String,
}

/// Run record. Holds no timestamps, host data or thread counts so that
/// identical inputs give an identical manifest.
#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    outputs: Vec<Entry<'a>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub(super) fn write_outputs(
    dir: &Path,
    subcommand: &str,
    config: &[u8],
    seed: Option<u64>,
    artifacts: &[Artifact],
) -> Result<Vec<PathBuf>, RunError> {
    let io = |path: &Path, e: std::io::Error| RunError::Io(format!("cannot write {}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut sorted: Vec<&Artifact> = artifacts.iter().collect();
    sorted.sort_by(|a, b| a.file.cmp(&b.file));
    let mut written = Vec::with_capacity(sorted.len() + 1);
    for a in &sorted {
        let path = dir.join(&a.file);
        std::fs::write(&path, &a.bytes).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        config_sha256: sha256_hex(config),
        seed,
        outputs: sorted
            .iter()
            .map(|a| Entry {
                file: &a.file,
                bytes: a.bytes.len(),
                sha256: sha256_hex(&a.bytes),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, text).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(written)
}
