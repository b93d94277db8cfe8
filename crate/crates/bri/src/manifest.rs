//! `manifest.json`, written once per run next to the CSV artifacts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
    pub rng_algorithm: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    /// Full argument vector, so the run can be repeated.
    pub args: Vec<String>,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(subcommand: &str, config_path: Option<&Path>, seed: u64, output_dir: &Path) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config_path: config_path.map(Path::to_path_buf),
            seed,
            output_dir: output_dir.to_path_buf(),
            artifacts: Vec::new(),
            rng_algorithm: bri_core::rng::RNG_ALGORITHM.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            args: std::env::args().collect(),
        }
    }

    /// Records the checksum of a file already written to the output directory.
    pub fn add_artifact(&mut self, file: &str) -> std::io::Result<()> {
        let sha256 = sha256_file(&self.output_dir.join(file))?;
        self.artifacts.push(Artifact {
            file: file.to_string(),
            sha256,
        });
        Ok(())
    }

    pub fn write(&self) -> std::io::Result<PathBuf> {
        let path = self.output_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_match_known_digest() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), b"abc").unwrap();
        let mut m = RunManifest::new("interp", None, 3, dir.path());
        m.add_artifact("a.csv").unwrap();
        assert_eq!(
            m.artifacts[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let path = m.write().unwrap();
        let back: RunManifest = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
