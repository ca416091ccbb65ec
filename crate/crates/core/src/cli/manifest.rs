//! Stage manifests.
//!
//! Every pipeline stage writes `manifest.json` next to its outputs: the
//! stage name, the effective configuration and the SHA-256 of each input and
//! output file. Downstream stages check the hashes of the artifacts they
//! consume against the producing stage's manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the manifest's directory.
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

impl Manifest {
    pub fn new(stage: &str) -> Self {
        Self {
            stage: stage.to_owned(),
            config: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: hash_file(path)?,
        });
        Ok(())
    }

    /// Records every file in `dir` listed in its manifest as an input.
    pub fn add_input_dir(&mut self, dir: &Path, upstream: &Manifest) {
        for out in &upstream.outputs {
            self.inputs.push(FileDigest {
                path: dir.join(&out.path).display().to_string(),
                sha256: out.sha256.clone(),
            });
        }
    }

    pub fn add_output(&mut self, dir: &Path, name: &str) -> anyhow::Result<()> {
        self.outputs.push(FileDigest {
            path: name.to_owned(),
            sha256: hash_file(&dir.join(name))?,
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self)? + "\n";
        fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)
            .with_context(|| format!("missing upstream manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("corrupt manifest {}", path.display()))
    }

    pub fn output_hash(&self, name: &str) -> Option<&str> {
        self.outputs
            .iter()
            .find(|o| o.path == name)
            .map(|o| o.sha256.as_str())
    }
}

/// Reads `dir`'s manifest, checks it was written by `stage` and that every
/// listed output still has its recorded hash.
pub fn verify_dir(dir: &Path, stage: &str) -> anyhow::Result<Manifest> {
    let manifest = Manifest::read(dir)?;
    if manifest.stage != stage {
        bail!(
            "{} was produced by stage `{}`, expected `{stage}`",
            dir.display(),
            manifest.stage
        );
    }
    for out in &manifest.outputs {
        let path = dir.join(&out.path);
        let actual = hash_file(&path)?;
        if actual != out.sha256 {
            bail!(
                "{} does not match its manifest (expected sha256 {}, found {actual})",
                path.display(),
                out.sha256
            );
        }
    }
    Ok(manifest)
}

/// Checks a single input file against the manifest of the directory that
/// holds it, when that manifest lists the file. Files without a manifest
/// (raw inputs) pass unchecked. Returns the file's hash.
pub fn verify_file(path: &Path) -> anyhow::Result<String> {
    let actual = hash_file(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let dir = if dir.as_os_str().is_empty() { Path::new(".") } else { dir };
    if !dir.join(MANIFEST_FILE).exists() {
        return Ok(actual);
    }
    let manifest = Manifest::read(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    if let Some(expected) = manifest.output_hash(&name) {
        if expected != actual {
            bail!(
                "{} does not match its manifest (expected sha256 {expected}, found {actual})",
                path.display()
            );
        }
    }
    Ok(actual)
}
