use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_SCHEMA: &str = "tailind.manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub kind: String,
    pub code_version: String,
    pub seed: u64,
    /// Effective configuration, file plus flags.
    pub config: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub stages: Vec<Stage>,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl OutputDigest {
    pub fn of(file: &str, bytes: &[u8]) -> Self {
        Self { file: file.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) }
    }
}
