use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use siegel_renorm::henon::Config;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

impl FileRecord {
    pub fn of(path: &Path) -> Result<FileRecord> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(FileRecord {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub version: String,
    pub config: Config,
    pub precision_bits: u32,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    /// Hash of the fixed-point artifact the run depended on.
    pub zeta_star_sha256: Option<String>,
    pub wall_seconds: f64,
}

/// Collects the files a command writes into its output directory.
pub struct Outputs {
    pub dir: PathBuf,
    pub files: Vec<FileRecord>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Outputs> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileRecord {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }
}
