//! Run manifests: every emitted artifact is accompanied by a JSON record
//! of the command, the fully resolved configuration, the seeds, and the
//! content digests of the inputs that produced it.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::DataError;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Fully resolved configuration, defaults materialized.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Input label -> SHA-256 of the file contents.
    pub input_digests: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    /// Wall times per phase; only recorded when explicitly requested so
    /// that re-runs stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u128>>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::Value::Null,
            seeds: Vec::new(),
            input_digests: BTreeMap::new(),
            warnings: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn digest_input(&mut self, label: &str, path: impl AsRef<Path>) -> Result<(), DataError> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.input_digests
            .insert(label.to_string(), hex::encode(hasher.finalize()));
        Ok(())
    }

    pub fn record_timing(&mut self, phase: &str, ms: u128) {
        self.timings_ms
            .get_or_insert_with(BTreeMap::new)
            .insert(phase.to_string(), ms);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timings_are_omitted_unless_recorded() {
        let mut m = RunManifest::new("learn");
        m.seeds.push(7);
        let json = m.to_json();
        assert!(!json.contains("timings_ms"));
        m.record_timing("skeleton", 12);
        assert!(m.to_json().contains("timings_ms"));
    }

    #[test]
    fn digests_are_stable() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), b"hello").unwrap();
        let mut a = RunManifest::new("x");
        a.digest_input("data", f.path()).unwrap();
        let mut b = RunManifest::new("x");
        b.digest_input("data", f.path()).unwrap();
        assert_eq!(a.input_digests, b.input_digests);
        assert_eq!(
            a.input_digests["data"],
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
    }
}
