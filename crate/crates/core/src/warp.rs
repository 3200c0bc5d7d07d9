//! Weighted approximate-rank pairwise learning.
//!
//! Each step draws candidates until one comes within the unit margin of the
//! positive, estimates the positive's rank from the number of draws `K`,
//! and descends the hinge weighted by the partial harmonic sum of that rank.
//! Touched rows are projected back onto the norm ball of radius `C`.

use std::time::Instant;

use crate::bpr::{apply_latent_step, epoch_order, PairwiseSample, PositiveSampling};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::linalg::project_ball;
use crate::models::{init_bank, Dims, Model, ModelKind, ParamBank, Scorer, INIT_RANGE};
use crate::seed;
use crate::train::{check_inputs, run_epochs, EpochWork, StopRule, TrainOutcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpConfig {
    pub alpha: f64,
    /// Norm radius for embedding rows and encoder matrices.
    pub c: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub eval_k: usize,
    pub seed: u64,
    pub dim: usize,
    pub init_low: f64,
    pub init_high: f64,
    /// Candidate draws per step; `None` means `|A| - 1`.
    pub max_sampling_attempts: Option<usize>,
    pub positive_sampling: PositiveSampling,
    /// Keep a per-step trace in the outcome.
    pub record_trace: bool,
}

impl Default for WarpConfig {
    fn default() -> Self {
        WarpConfig {
            alpha: 0.05,
            c: 1.0,
            max_epochs: 100,
            patience: 5,
            eval_k: 10,
            seed: 0,
            dim: 10,
            init_low: INIT_RANGE.0,
            init_high: INIT_RANGE.1,
            max_sampling_attempts: None,
            positive_sampling: PositiveSampling::Sweep,
            record_trace: false,
        }
    }
}

impl WarpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::invalid(format!("alpha {} must be positive", self.alpha)));
        }
        if !(self.c > 0.0) {
            return Err(Error::invalid(format!("constraint radius {} must be positive", self.c)));
        }
        if self.max_sampling_attempts == Some(0) {
            return Err(Error::invalid("max_sampling_attempts must be at least 1"));
        }
        if self.patience < 1 || self.eval_k < 1 || self.dim < 1 {
            return Err(Error::invalid("patience, eval_k and dim must be at least 1"));
        }
        Ok(())
    }

    fn attempts_for(&self, n_items: usize) -> usize {
        self.max_sampling_attempts.unwrap_or(n_items.saturating_sub(1)).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpStepTrace {
    /// Candidates drawn, `K`.
    pub attempts: usize,
    pub violator_found: bool,
    pub estimated_rank: usize,
    pub loss_weight: f64,
}

/// `L(k) = sum_{i=1..k} 1/i`.
pub fn harmonic_weight(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// `floor((n_items - 1) / K)`.
pub fn estimate_rank(attempts: usize, n_items: usize) -> usize {
    debug_assert!(attempts >= 1);
    n_items.saturating_sub(1) / attempts.max(1)
}

/// Items `b != a` with `1 + f(q,u,b) >= f(q,u,a)`, by full scoring.
pub fn exact_margin_rank<S: Scorer + ?Sized>(model: &S, q: usize, u: usize, a: usize) -> Result<usize> {
    let scores = model.score_all_items(q, u)?;
    let fa = *scores.get(a).ok_or(Error::IndexOutOfRange {
        what: "item",
        index: a,
        size: scores.len(),
    })?;
    Ok(scores
        .iter()
        .enumerate()
        .filter(|&(b, fb)| b != a && 1.0 + fb >= fa)
        .count())
}

// Caches S_q U_u so each candidate costs O(n) (LCR) or O(n^2) (ILCR).
struct PairScorer<'a> {
    bank: &'a ParamBank,
    q: usize,
    u: usize,
    su: Vec<f64>,
    buf: Vec<f64>,
}

impl<'a> PairScorer<'a> {
    fn new(bank: &'a ParamBank, q: usize, u: usize) -> Self {
        let n = bank.n();
        let mut su = vec![0.0; n];
        bank.query_user_row(q, u, &mut su);
        PairScorer { bank, q, u, su, buf: vec![0.0; n] }
    }

    fn score(&mut self, a: usize) -> f64 {
        let lcr = self.bank.lcr_with(&self.su, self.u, a);
        if self.bank.has_item_encoders() {
            lcr + self.bank.item_term_with(self.q, self.u, a, &mut self.buf)
        } else {
            lcr
        }
    }
}

fn violator_search<R: rand::Rng + ?Sized>(
    scorer: &mut PairScorer<'_>,
    a: usize,
    fa: f64,
    rng: &mut R,
    max_attempts: usize,
) -> (Option<(usize, f64)>, usize) {
    let n_items = scorer.bank.dims().n_items;
    for k in 1..=max_attempts {
        // Uniform over A \ {a}.
        let r = rng.gen_range(0..n_items - 1);
        let b = if r < a { r } else { r + 1 };
        let fb = scorer.score(b);
        if 1.0 + fb > fa {
            return (Some((b, fb)), k);
        }
    }
    (None, max_attempts)
}

/// Draws from `A \ {a}` until `1 + f(q,u,b) > f(q,u,a)`; returns the
/// violator and the draw count, or `None` after `max_attempts` draws.
pub fn sample_violator<R: rand::Rng + ?Sized>(
    bank: &ParamBank,
    q: usize,
    u: usize,
    a: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Option<(usize, usize)>> {
    bank.dims().check(q, u, a)?;
    if bank.dims().n_items < 2 {
        return Err(Error::invalid("violator sampling needs at least two items"));
    }
    let mut scorer = PairScorer::new(bank, q, u);
    let fa = scorer.score(a);
    let (hit, k) = violator_search(&mut scorer, a, fa, rng, max_attempts.max(1));
    Ok(hit.map(|(b, _)| (b, k)))
}

/// Rescales every row touched by `s` onto the radius-`c` ball; encoders use
/// the Frobenius norm.
fn project_touched(bank: &mut ParamBank, s: &PairwiseSample, c: f64) {
    project_ball(bank.s_row_mut(s.query), c);
    project_ball(bank.v_row_mut(s.user), c);
    project_ball(bank.t_row_mut(s.pos), c);
    project_ball(bank.t_row_mut(s.neg), c);
    project_ball(bank.user_encoder_mut(s.user), c);
    for item in [s.pos, s.neg] {
        if let Some(enc) = bank.item_encoder_mut(item) {
            project_ball(enc, c);
        }
    }
}

pub(crate) fn warp_step_timed<R: rand::Rng + ?Sized>(
    bank: &mut ParamBank,
    q: usize,
    u: usize,
    a: usize,
    cfg: &WarpConfig,
    rng: &mut R,
) -> Result<(WarpStepTrace, f64)> {
    let dims = bank.dims();
    dims.check(q, u, a)?;
    if dims.n_items < 2 {
        return Err(Error::invalid("WARP needs at least two items"));
    }
    let max_attempts = cfg.attempts_for(dims.n_items);

    let start = Instant::now();
    let mut scorer = PairScorer::new(bank, q, u);
    let fa = scorer.score(a);
    let (hit, attempts) = if fa.is_finite() {
        violator_search(&mut scorer, a, fa, rng, max_attempts)
    } else {
        (None, 0)
    };
    let sampling = start.elapsed().as_secs_f64();
    if !fa.is_finite() {
        return Err(Error::Divergence(format!("score({q}, {u}, {a})")));
    }

    let Some((b, fb)) = hit else {
        let trace = WarpStepTrace {
            attempts,
            violator_found: false,
            estimated_rank: 0,
            loss_weight: 0.0,
        };
        return Ok((trace, sampling));
    };
    if !fb.is_finite() {
        return Err(Error::Divergence(format!("score({q}, {u}, {b})")));
    }
    let rank = estimate_rank(attempts, dims.n_items);
    let weight = harmonic_weight(rank);
    let hinge = (1.0 - fa + fb).max(0.0);
    let sample = PairwiseSample {
        user: u,
        query: q,
        pos: a,
        neg: b,
    };
    if hinge > 0.0 && weight > 0.0 {
        apply_latent_step(bank, &sample, cfg.alpha, weight, 0.0)?;
        project_touched(bank, &sample, cfg.c);
    }
    let trace = WarpStepTrace {
        attempts,
        violator_found: true,
        estimated_rank: rank,
        loss_weight: weight,
    };
    Ok((trace, sampling))
}

/// One WARP update for the positive `(q, u, a)`. Leaves the bank untouched
/// when no violator is found within the attempt budget.
pub fn warp_step<R: rand::Rng + ?Sized>(
    bank: &mut ParamBank,
    q: usize,
    u: usize,
    a: usize,
    cfg: &WarpConfig,
    rng: &mut R,
) -> Result<WarpStepTrace> {
    warp_step_timed(bank, q, u, a, cfg, rng).map(|(trace, _)| trace)
}

#[derive(Debug, Clone)]
pub struct WarpOutcome {
    pub train: TrainOutcome,
    /// Every step of every run epoch, in order; empty unless
    /// `record_trace` was set.
    pub traces: Vec<WarpStepTrace>,
}

impl WarpOutcome {
    /// Trace CSV: step, K, violator_found, estimated_rank, loss_weight.
    pub fn write_trace_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "K", "violator_found", "estimated_rank", "loss_weight"])?;
        for (i, t) in self.traces.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                t.attempts.to_string(),
                t.violator_found.to_string(),
                t.estimated_rank.to_string(),
                format!("{:.9}", t.loss_weight),
            ])?;
        }
        w.flush().map_err(|e| Error::io("trace csv", e))?;
        Ok(())
    }
}

pub fn train_warp(kind: ModelKind, train: &Corpus, validation: &Corpus, cfg: &WarpConfig) -> Result<WarpOutcome> {
    cfg.validate()?;
    if !matches!(kind, ModelKind::Lcr | ModelKind::Ilcr) {
        return Err(Error::Unsupported(format!("WARP trains lcr or ilcr, not {kind}")));
    }
    let dims = Dims::for_corpus(train, cfg.dim);
    let model = init_bank(kind, dims, cfg.init_low, cfg.init_high, seed::derive(cfg.seed, "init"))?;
    train_warp_from(model, train, validation, cfg)
}

pub fn train_warp_from(model: Model, train: &Corpus, validation: &Corpus, cfg: &WarpConfig) -> Result<WarpOutcome> {
    cfg.validate()?;
    if model.as_latent().is_none() {
        return Err(Error::Unsupported(format!("WARP trains lcr or ilcr, not {}", model.kind())));
    }
    check_inputs(&model, train, validation)?;
    let mut order_rng = seed::rng(seed::derive(cfg.seed, "order"));
    let mut candidate_rng = seed::rng(seed::derive(cfg.seed, "negatives"));
    let mut traces = Vec::new();
    let rule = StopRule {
        max_epochs: cfg.max_epochs,
        patience: cfg.patience,
        eval_k: cfg.eval_k,
    };
    let triples = train.interactions();
    let outcome = run_epochs(model, validation, rule, |m| {
        let Model::Latent(bank) = m else {
            unreachable!("checked above")
        };
        let mut work = EpochWork::default();
        for idx in epoch_order(triples.len(), cfg.positive_sampling, &mut order_rng) {
            let t = triples[idx];
            let (trace, seconds) = warp_step_timed(bank, t.query, t.user, t.item, cfg, &mut candidate_rng)?;
            work.steps += 1;
            work.draws += trace.attempts as u64;
            work.updates += u64::from(trace.violator_found);
            work.sampling_seconds += seconds;
            if cfg.record_trace {
                traces.push(trace);
            }
        }
        Ok(work)
    })?;
    Ok(WarpOutcome { train: outcome, traces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic_weight(0), 0.0);
        assert_eq!(harmonic_weight(1), 1.0);
        assert!((harmonic_weight(3) - 11.0 / 6.0).abs() < 1e-15);
        assert!((harmonic_weight(100) - 5.187_377_517_639_621).abs() < 1e-12);
    }

    #[test]
    fn rank_estimates() {
        assert_eq!(estimate_rank(4, 101), 25);
        assert_eq!(estimate_rank(1, 101), 100);
        assert_eq!(estimate_rank(100, 101), 1);
    }

    /// Bank whose score for item `a` is `t_a[0]`: V_u = e_0, S and U zero.
    fn item_score_bank(scores: &[f64]) -> ParamBank {
        let n = 2;
        let dims = Dims::new(1, 1, scores.len(), n);
        let t = scores.iter().flat_map(|&s| [s, 0.0]).collect();
        ParamBank::from_parts(ModelKind::Lcr, dims, vec![0.0; n], vec![1.0, 0.0], t, vec![0.0; n * n], None)
            .unwrap()
    }

    #[test]
    fn margin_rank_cases() {
        let bank = item_score_bank(&[10.0, 5.0, 4.0, -1.0]);
        assert_eq!(exact_margin_rank(&bank, 0, 0, 0).unwrap(), 0);
        let tie = item_score_bank(&[3.0, 3.0, 0.0]);
        assert_eq!(exact_margin_rank(&tie, 0, 0, 0).unwrap(), 1);
    }

    #[test]
    fn violator_immediate_or_absent() {
        let mut rng = seed::rng(1);
        let all_violate = item_score_bank(&[0.0, 5.0, 6.0, 7.0]);
        for _ in 0..20 {
            let (_, k) = sample_violator(&all_violate, 0, 0, 0, &mut rng, 10).unwrap().unwrap();
            assert_eq!(k, 1);
        }
        let none = item_score_bank(&[10.0, 0.0, 1.0]);
        assert_eq!(sample_violator(&none, 0, 0, 0, &mut rng, 25).unwrap(), None);
    }

    #[test]
    fn no_violator_leaves_bank() {
        let mut bank = item_score_bank(&[10.0, 0.0, 1.0]);
        let before = bank.clone();
        let cfg = WarpConfig::default();
        let trace = warp_step(&mut bank, 0, 0, 0, &cfg, &mut seed::rng(2)).unwrap();
        assert!(!trace.violator_found);
        assert_eq!(trace.attempts, 2);
        assert_eq!(bank, before);
    }

    #[test]
    fn first_draw_hit_weight() {
        // Every other item outscores the positive, so K = 1.
        let mut scores = vec![5.0; 101];
        scores[0] = 0.0;
        let mut bank = item_score_bank(&scores);
        let cfg = WarpConfig { c: 100.0, ..Default::default() };
        let trace = warp_step(&mut bank, 0, 0, 0, &cfg, &mut seed::rng(3)).unwrap();
        assert_eq!(trace.attempts, 1);
        assert_eq!(trace.estimated_rank, 100);
        assert!((trace.loss_weight - 5.187_378).abs() < 1e-6);
    }

    #[test]
    fn projection_holds_after_steps() {
        let Model::Latent(mut bank) = init_bank(ModelKind::Ilcr, Dims::new(3, 3, 20, 4), -2.0, 2.0, 4).unwrap()
        else {
            unreachable!()
        };
        let cfg = WarpConfig { alpha: 0.5, c: 1.0, ..Default::default() };
        let mut rng = seed::rng(5);
        for step in 0..200 {
            let (q, u, a) = (step % 3, (step / 3) % 3, step % 20);
            let before = bank.clone();
            let trace = warp_step(&mut bank, q, u, a, &cfg, &mut rng).unwrap();
            if trace.violator_found {
                assert!(norm(bank.s_row(q)) <= 1.0 + 1e-12);
                assert!(norm(bank.v_row(u)) <= 1.0 + 1e-12);
                assert!(norm(bank.t_row(a)) <= 1.0 + 1e-12);
                assert!(norm(bank.user_encoder(u)) <= 1.0 + 1e-12);
                assert!(norm(bank.item_encoder(a).unwrap()) <= 1.0 + 1e-12);
            } else {
                assert_eq!(bank, before);
            }
        }
    }

    #[test]
    fn rejects_pitf_and_bad_config() {
        let corpus = Corpus::from_index_triples(1, 1, 3, [crate::corpus::Interaction::new(0, 0, 0)]).unwrap();
        assert!(train_warp(ModelKind::Pitf, &corpus, &corpus, &WarpConfig::default()).is_err());
        let bad = WarpConfig { c: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
