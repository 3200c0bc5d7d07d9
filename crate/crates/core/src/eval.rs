//! recall@k over test triples and the BPR/WARP cost comparison.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;

use crate::bpr::{train_bpr_from, LearnerConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::models::{init_bank, Dims, Model, ModelKind, Scorer};
use crate::seed;
use crate::train::TrainOutcome;
use crate::warp::{train_warp_from, WarpConfig};

/// Cumulative learner cost attached to a report.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LearnerTiming {
    pub sampling_seconds: f64,
    pub step_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Requested k → mean hit rate.
    pub recall_at: BTreeMap<usize, f64>,
    pub n_test: usize,
    /// 1-based rank of each test triple's positive, in test order.
    pub per_triple_ranks: Option<Vec<usize>>,
    pub timing: Option<LearnerTiming>,
}

impl EvalReport {
    /// Recall at a k that was requested.
    pub fn recall(&self, k: usize) -> f64 {
        self.recall_at[&k]
    }

    /// `(k, mean_recall)` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "mean_recall"])?;
        for (k, r) in &self.recall_at {
            w.write_record([k.to_string(), format!("{r:.6}")])?;
        }
        w.flush().map_err(|e| Error::io("recall csv", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions<'a> {
    /// Drop this corpus's positives for the pair (other than the test item)
    /// from the candidate list. Off by default.
    pub exclude: Option<&'a Corpus>,
    pub keep_ranks: bool,
}

/// The default k list, 5 through 30.
pub const DEFAULT_KS: [usize; 6] = [5, 10, 15, 20, 25, 30];

/// 1-based rank of `item` under descending score, ties to the lower index.
pub fn rank_of(scores: &[f64], item: usize) -> usize {
    rank_filtered(scores, item, |_| false)
}

fn rank_filtered(scores: &[f64], item: usize, skip: impl Fn(usize) -> bool) -> usize {
    let target = scores[item];
    if target.is_nan() {
        return scores.len();
    }
    1 + scores
        .iter()
        .enumerate()
        .filter(|&(b, &s)| b != item && !skip(b) && (s > target || (s == target && b < item)))
        .count()
}

pub fn recall_at_k<S: Scorer + Sync + ?Sized>(model: &S, test: &Corpus, ks: &[usize]) -> Result<EvalReport> {
    recall_at_k_with(model, test, ks, &EvalOptions::default())
}

/// Ranks every item for each test triple and reports the mean hit rate
/// at each k. Triples sharing a (user, query) pair share one scoring pass.
pub fn recall_at_k_with<S: Scorer + Sync + ?Sized>(
    model: &S,
    test: &Corpus,
    ks: &[usize],
    opts: &EvalOptions<'_>,
) -> Result<EvalReport> {
    if ks.is_empty() {
        return Err(Error::invalid("no k requested"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0) {
        return Err(Error::invalid(format!("k = {k} must be positive")));
    }
    if test.is_empty() {
        return Err(Error::EmptyCorpus("test set".into()));
    }
    let dims = model.dims();
    dims.check_corpus(test)?;
    let n_items = dims.n_items;
    let effective: Vec<usize> = ks
        .iter()
        .map(|&k| {
            if k > n_items {
                log::warn!("k = {k} exceeds {n_items} items; clamping");
                n_items
            } else {
                k
            }
        })
        .collect();

    let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, t) in test.interactions().iter().enumerate() {
        groups.entry((t.user, t.query)).or_default().push(i);
    }
    let mut groups: Vec<((usize, usize), Vec<usize>)> = groups.into_iter().collect();
    groups.sort_unstable_by_key(|(key, _)| *key);

    let triples = test.interactions();
    let ranked: Vec<Vec<(usize, usize)>> = groups
        .par_iter()
        .map(|&((u, q), ref members)| {
            let scores = model.score_all_items(q, u)?;
            let excluded = opts.exclude.and_then(|c| c.positives(u, q));
            Ok(members
                .iter()
                .map(|&i| {
                    let a = triples[i].item;
                    let rank = rank_filtered(&scores, a, |b| excluded.is_some_and(|p| p.contains(&b)));
                    (i, rank)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut ranks = vec![0usize; test.len()];
    for (i, rank) in ranked.into_iter().flatten() {
        ranks[i] = rank;
    }
    let n_test = ranks.len();
    let recall_at = ks
        .iter()
        .zip(&effective)
        .map(|(&k, &eff)| {
            let hits = ranks.iter().filter(|&&r| r <= eff).count();
            (k, hits as f64 / n_test as f64)
        })
        .collect();
    Ok(EvalReport {
        recall_at,
        n_test,
        per_triple_ranks: opts.keep_ranks.then_some(ranks),
        timing: None,
    })
}

/// BPR and WARP runs of one model kind from the same initial bank.
#[derive(Debug, Clone)]
pub struct PairedReport {
    pub kind: ModelKind,
    pub bpr: TrainOutcome,
    pub warp: TrainOutcome,
}

/// One row of the learner comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub epoch: usize,
    pub learner: &'static str,
    /// Sampling time summed over epochs `1..=epoch`.
    pub accumulated_sampling_seconds: f64,
    /// Candidate draws within this epoch.
    pub total_draws: u64,
    pub steps: u64,
    pub recall: f64,
}

impl PairedReport {
    pub fn rows(&self) -> Vec<ComparisonRow> {
        let mut rows = Vec::new();
        for (learner, outcome) in [("bpr", &self.bpr), ("warp", &self.warp)] {
            let mut acc = 0.0;
            for e in &outcome.history {
                acc += e.work.sampling_seconds;
                rows.push(ComparisonRow {
                    epoch: e.epoch,
                    learner,
                    accumulated_sampling_seconds: acc,
                    total_draws: e.work.draws,
                    steps: e.work.steps,
                    recall: e.validation_recall,
                });
            }
        }
        rows
    }

    /// Columns: epoch, learner, accumulated_sampling_seconds, total_draws,
    /// steps, recall_at_{k}.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "epoch".to_string(),
            "learner".into(),
            "accumulated_sampling_seconds".into(),
            "total_draws".into(),
            "steps".into(),
            format!("recall_at_{}", self.bpr.eval_k),
        ])?;
        for r in self.rows() {
            w.write_record([
                r.epoch.to_string(),
                r.learner.to_string(),
                format!("{:.6}", r.accumulated_sampling_seconds),
                r.total_draws.to_string(),
                r.steps.to_string(),
                format!("{:.6}", r.recall),
            ])?;
        }
        w.flush().map_err(|e| Error::io("comparison csv", e))?;
        Ok(())
    }
}

/// Trains `kind` with both learners from one initial bank, seeded from
/// `bpr_cfg.seed`. Both runs evaluate validation recall at their own
/// `eval_k` (30 for the standard comparison).
pub fn compare_learners(
    kind: ModelKind,
    train: &Corpus,
    validation: &Corpus,
    bpr_cfg: &LearnerConfig,
    warp_cfg: &WarpConfig,
) -> Result<PairedReport> {
    bpr_cfg.validate()?;
    warp_cfg.validate()?;
    if bpr_cfg.dim != warp_cfg.dim {
        return Err(Error::invalid(format!(
            "learners disagree on dimension: {} vs {}",
            bpr_cfg.dim, warp_cfg.dim
        )));
    }
    let dims = Dims::for_corpus(train, bpr_cfg.dim);
    let init: Model = init_bank(
        kind,
        dims,
        bpr_cfg.init_low,
        bpr_cfg.init_high,
        seed::derive(bpr_cfg.seed, "init"),
    )?;
    let bpr = train_bpr_from(init.clone(), train, validation, bpr_cfg)?;
    let warp = train_warp_from(init, train, validation, warp_cfg)?.train;
    Ok(PairedReport { kind, bpr, warp })
}
