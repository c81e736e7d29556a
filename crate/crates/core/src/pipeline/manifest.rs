use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Record of the artifacts under an output directory.
///
/// `stages` holds per-stage statistics keyed by stage name; `files` lists
/// every file in the tree except the manifest itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_digest: String,
    pub stages: BTreeMap<String, serde_json::Value>,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn new(config_digest: String) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config_digest,
            stages: BTreeMap::new(),
            warnings: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn load(out_dir: &Path) -> Result<Option<Self>> {
        let path = out_dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Some(serde_json::from_str(&text)?))
    }

    /// Loads the existing manifest, starting fresh when the config changed.
    pub fn load_or_new(out_dir: &Path, config_digest: &str) -> Result<Self> {
        Ok(match Self::load(out_dir)? {
            Some(m) if m.config_digest == config_digest => m,
            _ => Self::new(config_digest.to_owned()),
        })
    }

    pub fn rebuild_warnings(&mut self) {
        self.warnings = self
            .stages
            .iter()
            .flat_map(|(stage, v)| {
                v.get("warnings")
                    .and_then(|w| w.as_array())
                    .into_iter()
                    .flatten()
                    .filter_map(|w| w.as_str())
                    .map(move |w| format!("{stage}: {w}"))
            })
            .collect();
    }

    /// Rescans the output tree and writes the manifest.
    pub fn write(&mut self, out_dir: &Path) -> Result<()> {
        self.rebuild_warnings();
        self.files = scan_tree(out_dir)?;
        let path = out_dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Files whose current digest differs from the recorded one, or that vanished.
    pub fn verify(&self, out_dir: &Path) -> Result<Vec<String>> {
        let current: BTreeMap<String, FileEntry> =
            scan_tree(out_dir)?.into_iter().map(|f| (f.path.clone(), f)).collect();
        let mut bad: Vec<String> = self
            .files
            .iter()
            .filter(|f| current.get(&f.path) != Some(*f))
            .map(|f| f.path.clone())
            .collect();
        let listed: std::collections::BTreeSet<&str> = self.files.iter().map(|f| f.path.as_str()).collect();
        bad.extend(current.keys().filter(|p| !listed.contains(p.as_str())).cloned());
        Ok(bad)
    }
}

pub fn sha256_file(path: &Path) -> Result<(u64, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok((bytes.len() as u64, hex::encode(Sha256::digest(&bytes))))
}

/// Every file below `root` except the top-level manifest, sorted by
/// `/`-separated relative path.
pub fn scan_tree(root: &Path) -> Result<Vec<FileEntry>> {
    fn walk(dir: &Path, prefix: &str, out: &mut Vec<FileEntry>) -> Result<()> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            let rel = if prefix.is_empty() {
                name
            } else {
                format!("{prefix}/{name}")
            };
            let path = entry.path();
            if path.is_dir() {
                walk(&path, &rel, out)?;
            } else if rel != MANIFEST_FILE {
                let (bytes, sha256) = sha256_file(&path)?;
                out.push(FileEntry { path: rel, bytes, sha256 });
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    if root.exists() {
        walk(root, "", &mut out)?;
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}
