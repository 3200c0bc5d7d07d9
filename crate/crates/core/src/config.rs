//! Flat `key=value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are trimmed;
//! a later assignment overrides an earlier one.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::bpr::LearnerConfig;
use crate::error::{Error, Result};
use crate::warp::WarpConfig;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: origin.to_owned(),
                    line: i + 1,
                    message: "expected key=value".into(),
                });
            };
            entries.insert(key.trim().to_owned(), value.trim().to_owned());
        }
        Ok(KvConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        KvConfig::parse(&text, path)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::invalid(format!("config `{key}={v}`: {e}")))
            })
            .transpose()
    }

    /// `other` wins on shared keys.
    pub fn overlay(&mut self, other: &KvConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Sorted `key=value` lines.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn learner_config(&self, base: LearnerConfig) -> Result<LearnerConfig> {
        let mut cfg = base;
        if let Some(v) = self.get("alpha")? {
            cfg.alpha = v;
        }
        if let Some(v) = self.get("lambda")? {
            cfg.lambda = v;
        }
        if let Some(v) = self.get("max_epochs")? {
            cfg.max_epochs = v;
        }
        if let Some(v) = self.get("patience")? {
            cfg.patience = v;
        }
        if let Some(v) = self.get("eval_k")? {
            cfg.eval_k = v;
        }
        if let Some(v) = self.get("seed")? {
            cfg.seed = v;
        }
        if let Some(v) = self.get("n")? {
            cfg.dim = v;
        }
        if let Some(v) = self.get("init_low")? {
            cfg.init_low = v;
        }
        if let Some(v) = self.get("init_high")? {
            cfg.init_high = v;
        }
        if let Some(v) = self.get("positive_sampling")? {
            cfg.positive_sampling = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// WARP settings; `alpha`, `max_epochs` and friends are shared keys,
    /// `c` and `max_sampling_attempts` are WARP-only.
    pub fn warp_config(&self, base: WarpConfig) -> Result<WarpConfig> {
        let mut cfg = base;
        if let Some(v) = self.get("alpha")? {
            cfg.alpha = v;
        }
        if let Some(v) = self.get("c")? {
            cfg.c = v;
        }
        if let Some(v) = self.get("max_epochs")? {
            cfg.max_epochs = v;
        }
        if let Some(v) = self.get("patience")? {
            cfg.patience = v;
        }
        if let Some(v) = self.get("eval_k")? {
            cfg.eval_k = v;
        }
        if let Some(v) = self.get("seed")? {
            cfg.seed = v;
        }
        if let Some(v) = self.get("n")? {
            cfg.dim = v;
        }
        if let Some(v) = self.get("init_low")? {
            cfg.init_low = v;
        }
        if let Some(v) = self.get("init_high")? {
            cfg.init_high = v;
        }
        if let Some(v) = self.get::<usize>("max_sampling_attempts")? {
            cfg.max_sampling_attempts = Some(v);
        }
        if let Some(v) = self.get("positive_sampling")? {
            cfg.positive_sampling = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_apply() {
        let text = "# run\nalpha = 0.04\nlambda=0.01\n\nn=8\nalpha=0.05\n";
        let kv = KvConfig::parse(text, Path::new("cfg")).unwrap();
        let cfg = kv.learner_config(LearnerConfig::default()).unwrap();
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.lambda, 0.01);
        assert_eq!(cfg.dim, 8);
        let round = KvConfig::parse(&kv.to_text(), Path::new("cfg")).unwrap();
        assert_eq!(round, kv);
    }

    #[test]
    fn errors() {
        assert!(KvConfig::parse("alpha 0.1", Path::new("cfg")).is_err());
        let kv = KvConfig::parse("alpha=fast", Path::new("cfg")).unwrap();
        assert!(kv.learner_config(LearnerConfig::default()).is_err());
        let kv = KvConfig::parse("c=-1", Path::new("cfg")).unwrap();
        assert!(kv.warp_config(WarpConfig::default()).is_err());
    }

    #[test]
    fn overlay_precedence() {
        let mut file = KvConfig::parse("alpha=0.1\nlambda=0.2", Path::new("f")).unwrap();
        let mut cli = KvConfig::new();
        cli.set("alpha", 0.3);
        file.overlay(&cli);
        assert_eq!(file.get::<f64>("alpha").unwrap(), Some(0.3));
        assert_eq!(file.get::<f64>("lambda").unwrap(), Some(0.2));
    }
}
