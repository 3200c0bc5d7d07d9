//! Parameter banks and relevance scorers.

mod latent;
mod nmf;
mod pitf;

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::seed;

pub use latent::ParamBank;
pub use nmf::{nmf_train, query_item_counts, NmfConfig, NmfFit, NmfModel};
pub use pitf::PitfBank;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Lcr,
    Ilcr,
    Pitf,
    Nmf,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lcr => "lcr",
            ModelKind::Ilcr => "ilcr",
            ModelKind::Pitf => "pitf",
            ModelKind::Nmf => "nmf",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            ModelKind::Lcr => 1,
            ModelKind::Ilcr => 2,
            ModelKind::Pitf => 3,
            ModelKind::Nmf => 4,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            1 => ModelKind::Lcr,
            2 => ModelKind::Ilcr,
            3 => ModelKind::Pitf,
            4 => ModelKind::Nmf,
            _ => return None,
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lcr" => Ok(ModelKind::Lcr),
            "ilcr" => Ok(ModelKind::Ilcr),
            "pitf" => Ok(ModelKind::Pitf),
            "nmf" => Ok(ModelKind::Nmf),
            _ => Err(Error::invalid(format!("unknown model `{s}`"))),
        }
    }
}

/// Vocabulary sizes plus embedding dimension (NMF: rank).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n_queries: usize,
    pub n_users: usize,
    pub n_items: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(n_queries: usize, n_users: usize, n_items: usize, n: usize) -> Self {
        Dims {
            n_queries,
            n_users,
            n_items,
            n,
        }
    }

    pub fn for_corpus(corpus: &Corpus, n: usize) -> Self {
        Dims::new(corpus.n_queries(), corpus.n_users(), corpus.n_items(), n)
    }

    pub(crate) fn check(&self, q: usize, u: usize, a: usize) -> Result<()> {
        for (what, index, size) in [
            ("query", q, self.n_queries),
            ("user", u, self.n_users),
            ("item", a, self.n_items),
        ] {
            if index >= size {
                return Err(Error::IndexOutOfRange { what, index, size });
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.n_queries == 0 || self.n_users == 0 || self.n_items == 0 || self.n == 0 {
            return Err(Error::invalid(format!("nonpositive dimension in {self}")));
        }
        Ok(())
    }

    /// Errors unless `corpus` lives in the same index spaces.
    pub fn check_corpus(&self, corpus: &Corpus) -> Result<()> {
        if (self.n_queries, self.n_users, self.n_items)
            != (corpus.n_queries(), corpus.n_users(), corpus.n_items())
        {
            return Err(Error::ShapeMismatch {
                left: format!("model {}x{}x{}", self.n_queries, self.n_users, self.n_items),
                right: format!(
                    "corpus {}x{}x{}",
                    corpus.n_queries(),
                    corpus.n_users(),
                    corpus.n_items()
                ),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|Q|={} |U|={} |A|={} n={}",
            self.n_queries, self.n_users, self.n_items, self.n
        )
    }
}

/// Anything that scores (query, user, item) triples.
pub trait Scorer {
    fn dims(&self) -> Dims;

    fn score(&self, q: usize, u: usize, a: usize) -> Result<f64>;

    /// Scores for every item, element `a` equal to `score(q, u, a)`.
    fn score_all_items(&self, q: usize, u: usize) -> Result<Vec<f64>>;
}

/// A trained or initialized model of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Latent(ParamBank),
    Pitf(PitfBank),
    Nmf(NmfModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Latent(bank) => bank.kind(),
            Model::Pitf(_) => ModelKind::Pitf,
            Model::Nmf(_) => ModelKind::Nmf,
        }
    }

    pub fn as_latent(&self) -> Option<&ParamBank> {
        match self {
            Model::Latent(bank) => Some(bank),
            _ => None,
        }
    }

    pub fn as_pitf(&self) -> Option<&PitfBank> {
        match self {
            Model::Pitf(bank) => Some(bank),
            _ => None,
        }
    }

    /// Every trainable entry, in serialization order.
    pub fn parameters(&self) -> Vec<&[f64]> {
        match self {
            Model::Latent(bank) => bank.parameters(),
            Model::Pitf(bank) => bank.parameters(),
            Model::Nmf(m) => vec![m.w(), m.h()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.parameters().iter().all(|p| p.iter().all(|x| x.is_finite()))
    }
}

impl Scorer for Model {
    fn dims(&self) -> Dims {
        match self {
            Model::Latent(b) => b.dims(),
            Model::Pitf(b) => b.dims(),
            Model::Nmf(m) => m.dims(),
        }
    }

    fn score(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        match self {
            Model::Latent(b) => b.score(q, u, a),
            Model::Pitf(b) => b.score(q, u, a),
            Model::Nmf(m) => m.score(q, u, a),
        }
    }

    fn score_all_items(&self, q: usize, u: usize) -> Result<Vec<f64>> {
        match self {
            Model::Latent(b) => b.score_all_items(q, u),
            Model::Pitf(b) => b.score_all_items(q, u),
            Model::Nmf(m) => m.score_all_items(q, u),
        }
    }
}

pub(crate) fn uniform_fill(len: usize, dist: &Uniform<f64>, rng: &mut seed::Rng) -> Vec<f64> {
    (0..len).map(|_| dist.sample(rng)).collect()
}

/// Draws every parameter i.i.d. from `U[low, high)`.
pub fn init_bank(kind: ModelKind, dims: Dims, low: f64, high: f64, seed_value: u64) -> Result<Model> {
    if !(low < high) || !low.is_finite() || !high.is_finite() {
        return Err(Error::invalid(format!("init range [{low}, {high}) is empty")));
    }
    dims.validate()?;
    let dist = Uniform::new(low, high);
    let mut rng = seed::rng(seed_value);
    match kind {
        ModelKind::Lcr | ModelKind::Ilcr => {
            Ok(Model::Latent(ParamBank::random(kind, dims, &dist, &mut rng)))
        }
        ModelKind::Pitf => Ok(Model::Pitf(PitfBank::random(dims, &dist, &mut rng))),
        ModelKind::Nmf => Err(Error::Unsupported(
            "NMF is fitted in batch by nmf_train, not initialized as a bank".into(),
        )),
    }
}

/// The default initializer range `U(-0.02, 0.02)`.
pub const INIT_RANGE: (f64, f64) = (-0.02, 0.02);
