use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// File name relative to the output directory.
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Everything needed to reproduce a run, plus digests of what it wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputDigest>,
    /// Headline numbers of the run, in output order.
    pub summary: Vec<(String, f64)>,
}

pub fn digest_file(path: &Path) -> CliResult<OutputDigest> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(OutputDigest {
        file: path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest always serialises");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Recomputes every digest and reports the files that no longer match.
    pub fn verify(&self, dir: &Path) -> CliResult<Vec<String>> {
        let mut stale = Vec::new();
        for o in &self.outputs {
            if digest_file(&dir.join(&o.file))? != *o {
                stale.push(o.file.clone());
            }
        }
        Ok(stale)
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}
