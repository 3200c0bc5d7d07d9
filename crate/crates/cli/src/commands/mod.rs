pub mod bench;
pub mod eval;
pub mod ingest;
pub mod split;
pub mod train;

use std::fs;
use std::path::{Path, PathBuf};

use cortrieve::config::KvConfig;
use cortrieve::snapshot::load_corpus;
use cortrieve::Corpus;

use crate::args::HyperArgs;
use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CORTRIEVE_OUT_DIR";

/// `--out-dir`, else `$CORTRIEVE_OUT_DIR`, else the working directory.
pub fn out_dir(flag: Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = flag
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| cortrieve::Error::io(&dir, e))?;
    Ok(dir)
}

/// Config file values overlaid with whichever flags were given.
pub fn layered_config(hyper: &HyperArgs) -> CliResult<KvConfig> {
    let mut cfg = match &hyper.config {
        Some(path) => KvConfig::load(path)?,
        None => KvConfig::new(),
    };
    let mut flags = KvConfig::new();
    let mut put = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            flags.set(key, v);
        }
    };
    put("alpha", hyper.alpha.map(|v| v.to_string()));
    put("lambda", hyper.lambda.map(|v| v.to_string()));
    put("n", hyper.n.map(|v| v.to_string()));
    put("c", hyper.c.map(|v| v.to_string()));
    put("max_epochs", hyper.max_epochs.map(|v| v.to_string()));
    put("patience", hyper.patience.map(|v| v.to_string()));
    put("eval_k", hyper.eval_k.map(|v| v.to_string()));
    put("seed", hyper.seed.map(|v| v.to_string()));
    put("positive_sampling", hyper.positive_sampling.clone());
    put("max_sampling_attempts", hyper.max_sampling_attempts.map(|v| v.to_string()));
    cfg.overlay(&flags);
    Ok(cfg)
}

/// A path from its flag or, failing that, from config key `key`.
pub fn path_from(flag: Option<PathBuf>, cfg: &KvConfig, key: &str) -> CliResult<PathBuf> {
    flag.or_else(|| cfg.get_str(key).map(PathBuf::from))
        .ok_or_else(|| CliError::usage(format!("--{key} is required (or `{key}=` in the config)")))
}

pub fn load_pair(train: &Path, validation: &Path) -> CliResult<(Corpus, Corpus)> {
    let train_corpus = load_corpus(train)?;
    let validation_corpus = load_corpus(validation)?;
    if !train_corpus.same_shape(&validation_corpus) {
        return Err(cortrieve::Error::ShapeMismatch {
            left: format!("{} {}", train.display(), shape(&train_corpus)),
            right: format!("{} {}", validation.display(), shape(&validation_corpus)),
        }
        .into());
    }
    Ok((train_corpus, validation_corpus))
}

pub fn shape(c: &Corpus) -> String {
    format!("{}x{}x{}", c.n_queries(), c.n_users(), c.n_items())
}
