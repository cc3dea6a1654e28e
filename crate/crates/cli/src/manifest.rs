use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use frameforge::seeds::hex_digest;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(InputDigest { path: path.display().to_string(), sha256: hex_digest(&bytes) })
    }
}

/// Provenance record written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub base_seed: u64,
    /// How component seeds are derived from the base seed.
    pub seed_derivation: String,
    pub inputs: Vec<InputDigest>,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Digest over everything that determines the results.
    pub digest: String,
}

pub fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, base_seed: u64, inputs: Vec<InputDigest>) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        // keyed on input contents, not paths
        let key = serde_json::json!({
            "version": version,
            "command": command,
            "config": config,
            "seed": base_seed,
            "inputs": inputs.iter().map(|i| &i.sha256).collect::<Vec<_>>(),
        });
        let digest = hex_digest(key.to_string().as_bytes());
        RunManifest {
            tool: "frameforge".to_string(),
            version,
            command: command.to_string(),
            config,
            base_seed,
            seed_derivation: "sha256(\"frameforge-seed/v1\" NUL base NUL component NUL speaker NUL k NUL run NUL)[0..8] as u64 LE"
                .to_string(),
            inputs,
            started_unix: now_unix(),
            finished_unix: 0,
            digest,
        }
    }

    pub fn write(&mut self, path: &Path) -> Result<()> {
        self.finished_unix = now_unix();
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
