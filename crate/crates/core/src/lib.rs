//! Collaborative retrieval over (query, user, item) triples.
//!
//! Latent-factor scorers (LCR, item-based ILCR, PITF, and an NMF baseline)
//! trained with pairwise ranking learners (BPR and WARP), plus corpus
//! ingestion and recall@k evaluation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bpr;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
mod linalg;
pub mod models;
pub mod planted;
pub mod seed;
pub mod snapshot;
pub mod train;
pub mod warp;

pub use bpr::{
    bpr_objective, bpr_step, bpr_step_ilcr, bpr_step_lcr, bpr_step_pitf, sample_negative, sigmoid, train_bpr,
    LearnerConfig, PairwiseSample, PositiveSampling,
};
pub use corpus::{
    ingest_lastfm, ingest_tsv, ingest_yelp, sparsity, split, Corpus, CorpusStats, Interaction, SplitSpec,
    TripleSchema,
};
pub use error::{Error, Result};
pub use eval::{compare_learners, recall_at_k, EvalOptions, EvalReport, PairedReport};
pub use models::{init_bank, Dims, Model, ModelKind, ParamBank, PitfBank, Scorer};
pub use train::{EpochStats, EpochWork, TrainOutcome};
pub use warp::{
    estimate_rank, exact_margin_rank, harmonic_weight, sample_violator, train_warp, warp_step, WarpConfig,
    WarpOutcome, WarpStepTrace,
};
