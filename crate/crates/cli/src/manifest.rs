//! Run manifests: the effective configuration plus `run.*` provenance keys,
//! written as a flat key=value file that `--config` accepts back.

use std::fs;
use std::io::Read;
use std::path::Path;

use cortrieve::config::KvConfig;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

/// SHA-256 of a file's bytes, hex encoded.
pub fn fingerprint(path: &Path) -> CliResult<String> {
    let mut file = fs::File::open(path).map_err(|e| cortrieve::Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| cortrieve::Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    entries: KvConfig,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut entries = KvConfig::new();
        entries.set("run.command", command);
        let argv: Vec<String> = std::env::args().skip(1).collect();
        entries.set("run.argv", argv.join(" "));
        entries.set("run.version", env!("CARGO_PKG_VERSION"));
        RunManifest { entries }
    }

    /// Copies configuration keys, skipping any provenance carried over from
    /// an earlier manifest.
    pub fn set_config(&mut self, config: &KvConfig) {
        for (k, v) in config.iter().filter(|(k, _)| !k.starts_with("run.")) {
            self.entries.set(k, v);
        }
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.set(key, value);
    }

    pub fn record_input(&mut self, name: &str, path: &Path) -> CliResult {
        let digest = fingerprint(path)?;
        self.entries.set(format!("run.input.{name}.sha256"), digest);
        Ok(())
    }

    pub fn record_seed(&mut self, label: &str, value: u64) {
        self.entries.set(format!("run.seed.{label}"), value);
    }

    pub fn record_output(&mut self, name: &str, path: &Path) {
        self.entries.set(format!("run.output.{name}"), path.display());
    }

    pub fn write(&self, path: &Path) -> CliResult {
        let text = format!("# cortrieve run manifest\n{}", self.entries.to_text());
        fs::write(path, text).map_err(|e| cortrieve::Error::io(path, e))?;
        Ok(())
    }
}

/// Warns when an input no longer matches the digest an earlier manifest
/// recorded for it.
pub fn check_recorded(config: &KvConfig, name: &str, path: &Path) -> CliResult {
    if let Some(recorded) = config.get_str(&format!("run.input.{name}.sha256")) {
        let now = fingerprint(path)?;
        if now != recorded {
            log::warn!("{} differs from the manifest's recorded {name} input", path.display());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("abc");
        fs::write(&path, b"abc").unwrap();
        assert_eq!(
            fingerprint(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_reloads_as_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = KvConfig::new();
        cfg.set("alpha", 0.04);
        cfg.set("run.command", "stale");
        let mut m = RunManifest::new("train");
        m.set_config(&cfg);
        m.record_seed("init", 7);
        let path = dir.path().join("manifest.txt");
        m.write(&path).unwrap();
        let back = KvConfig::load(&path).unwrap();
        assert_eq!(back.get::<f64>("alpha").unwrap(), Some(0.04));
        assert_eq!(back.get_str("run.command"), Some("train"));
        assert_eq!(back.get::<u64>("run.seed.init").unwrap(), Some(7));
    }
}
