//! Run manifests: every parameter, seed and input digest of one pipeline
//! step, written next to its outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Input path -> SHA-256 hex digest.
    pub inputs: BTreeMap<String, String>,
    /// Output path -> SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_digest(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            toolkit: "declist".into(),
            version: TOOLKIT_VERSION.into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> Result<&mut Self> {
        self.parameters.insert(key.into(), serde_json::to_value(value)?);
        Ok(self)
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        self.inputs.insert(path.display().to_string(), file_digest(path)?);
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> Result<&mut Self> {
        self.outputs.insert(path.display().to_string(), file_digest(path)?);
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }

    /// Short stable id derived from the command and its parameters.
    pub fn run_id(&self) -> String {
        let key = serde_json::to_string(&(&self.command, &self.parameters, &self.inputs)).unwrap_or_default();
        sha256_hex(key.as_bytes())[..12].to_string()
    }
}
