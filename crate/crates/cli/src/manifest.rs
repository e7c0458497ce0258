//! Run manifests written next to file outputs, and their replay.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every flag of the run, defaults included, keyed by long flag name.
    pub parameters: BTreeMap<String, String>,
    pub artifact_version: String,
    pub prime_table_limit: u64,
    pub outputs: Vec<OutputDigest>,
    /// Noteworthy results of the run, such as conjecture counterexamples.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }

    /// Command line that reproduces the run, with `--out` pointed at `out`.
    pub fn replay_args(&self, out: &Path) -> Vec<String> {
        let mut args = vec!["schemmel".to_string(), self.command.clone()];
        for (k, v) in &self.parameters {
            if k != "out" {
                args.push(format!("--{k}"));
                args.push(v.clone());
            }
        }
        args.push("--out".into());
        args.push(out.to_string_lossy().into_owned());
        args
    }
}
