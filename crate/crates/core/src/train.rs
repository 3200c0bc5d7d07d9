//! Epoch loop with validation-driven early stopping, shared by the learners.

use std::io::Write;
use std::time::Instant;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::recall_at_k;
use crate::models::{Model, Scorer};

/// What one learner epoch did.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpochWork {
    /// SGD steps attempted (one per visited positive).
    pub steps: u64,
    /// Steps that changed the bank.
    pub updates: u64,
    /// Candidate items drawn: one negative per BPR step, `K` per WARP step.
    pub draws: u64,
    /// Wall time spent drawing negatives or searching violators.
    pub sampling_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub validation_recall: f64,
    /// Training wall time of the epoch, excluding validation.
    pub seconds: f64,
    pub work: EpochWork,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Snapshot from the best validation epoch, or the initial bank when
    /// no epoch ran.
    pub model: Model,
    pub history: Vec<EpochStats>,
    pub best_epoch: Option<usize>,
    pub eval_k: usize,
}

impl TrainOutcome {
    pub fn best_recall(&self) -> Option<f64> {
        let best = self.best_epoch?;
        self.history.iter().find(|e| e.epoch == best).map(|e| e.validation_recall)
    }

    /// Per-epoch CSV: epoch, recall, seconds, draws, sampling time, steps, updates.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "epoch".to_string(),
            format!("recall_at_{}", self.eval_k),
            "seconds".into(),
            "negative_draws".into(),
            "sampling_seconds".into(),
            "steps".into(),
            "updates".into(),
        ])?;
        for e in &self.history {
            w.write_record([
                e.epoch.to_string(),
                format!("{:.6}", e.validation_recall),
                format!("{:.6}", e.seconds),
                e.work.draws.to_string(),
                format!("{:.6}", e.work.sampling_seconds),
                e.work.steps.to_string(),
                e.work.updates.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("history csv", e))?;
        Ok(())
    }
}

pub(crate) struct StopRule {
    pub max_epochs: usize,
    pub patience: usize,
    pub eval_k: usize,
}

pub(crate) fn check_inputs(model: &Model, train: &Corpus, validation: &Corpus) -> Result<()> {
    if train.is_empty() {
        return Err(Error::EmptyCorpus("training set".into()));
    }
    if validation.is_empty() {
        return Err(Error::EmptyCorpus("validation set".into()));
    }
    let dims = model.dims();
    dims.check_corpus(train)?;
    dims.check_corpus(validation)?;
    Ok(())
}

/// Runs `epoch` until `max_epochs` or until validation recall has not
/// improved for `patience` consecutive epochs, keeping the best snapshot.
pub(crate) fn run_epochs<F>(
    mut model: Model,
    validation: &Corpus,
    rule: StopRule,
    mut epoch: F,
) -> Result<TrainOutcome>
where
    F: FnMut(&mut Model) -> Result<EpochWork>,
{
    let mut history = Vec::new();
    let mut best: Option<(usize, f64, Model)> = None;
    let mut stale = 0;
    for index in 1..=rule.max_epochs {
        let start = Instant::now();
        let work = epoch(&mut model)?;
        let seconds = start.elapsed().as_secs_f64();
        let recall = recall_at_k(&model, validation, &[rule.eval_k])?.recall(rule.eval_k);
        history.push(EpochStats {
            epoch: index,
            validation_recall: recall,
            seconds,
            work,
        });
        log::debug!("epoch {index}: recall@{}={recall:.4} draws={}", rule.eval_k, work.draws);
        match &best {
            Some((_, r, _)) if recall <= *r => {
                stale += 1;
                if stale >= rule.patience {
                    break;
                }
            }
            _ => {
                best = Some((index, recall, model.clone()));
                stale = 0;
            }
        }
    }
    let (best_epoch, model) = match best {
        Some((epoch, _, snapshot)) => (Some(epoch), snapshot),
        None => (None, model),
    };
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
        eval_k: rule.eval_k,
    })
}
