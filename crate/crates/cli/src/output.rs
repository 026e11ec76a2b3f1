//! Atomic file output and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use talkshare::AnalysisConfig;

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// Everything needed to reproduce a run. The timestamp lives only here, so
/// every other output is byte-identical across reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: AnalysisConfig,
    pub seed: u64,
    /// sha256 of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &'static str, config: &AnalysisConfig, inputs: &[&Path]) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: config.clone(),
            seed: config.rng_seed,
            inputs,
            outputs: Vec::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }
}

/// Collects output files in memory and writes them, plus the manifest, only
/// once everything has been computed.
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, relative: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((relative.into(), bytes));
    }

    pub fn commit(self, mut manifest: RunManifest) -> Result<()> {
        for (rel, bytes) in &self.files {
            write_atomic(&self.dir.join(rel), bytes)?;
            manifest.outputs.push(rel.display().to_string());
        }
        write_atomic(&self.dir.join("manifest.json"), &to_json(&manifest)?)
    }
}

/// File-name-safe form of a conversation id.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}
