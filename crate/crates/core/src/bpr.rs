//! Bayesian personalized ranking: single-negative stochastic gradient
//! ascent on `sum ln sigma(x_uqab) - lambda ||theta||^2`.

use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::linalg::{all_finite, row_times, times_col};
use crate::models::{init_bank, Dims, Model, ModelKind, ParamBank, PitfBank, Scorer, INIT_RANGE};
use crate::seed;
use crate::train::{check_inputs, run_epochs, EpochWork, StopRule, TrainOutcome};

/// How positives are visited within an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PositiveSampling {
    /// One pass over a fresh shuffle of the training triples.
    #[default]
    Sweep,
    /// `|X|` positives drawn i.i.d. with replacement.
    Uniform,
}

impl FromStr for PositiveSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(PositiveSampling::Sweep),
            "uniform" => Ok(PositiveSampling::Uniform),
            _ => Err(Error::invalid(format!("unknown positive sampling `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub eval_k: usize,
    pub seed: u64,
    /// Embedding dimension of the bank being trained.
    pub dim: usize,
    pub init_low: f64,
    pub init_high: f64,
    pub positive_sampling: PositiveSampling,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            alpha: 0.04,
            lambda: 0.01,
            max_epochs: 100,
            patience: 5,
            eval_k: 10,
            seed: 0,
            dim: 10,
            init_low: INIT_RANGE.0,
            init_high: INIT_RANGE.1,
            positive_sampling: PositiveSampling::Sweep,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::invalid(format!("alpha {} must be positive", self.alpha)));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda {} must be nonnegative", self.lambda)));
        }
        if self.patience < 1 {
            return Err(Error::invalid("patience must be at least 1"));
        }
        if self.eval_k < 1 {
            return Err(Error::invalid("eval_k must be at least 1"));
        }
        if self.dim < 1 {
            return Err(Error::invalid("embedding dimension must be at least 1"));
        }
        Ok(())
    }
}

/// A training positive paired with a sampled negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseSample {
    pub user: usize,
    pub query: usize,
    pub pos: usize,
    pub neg: usize,
}

/// Logistic function, branching on sign so neither side overflows.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln sigmoid(x)` without underflow for large negative `x`.
pub fn ln_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Rejection attempts allowed per item before giving up.
pub const NEGATIVE_ATTEMPTS_PER_ITEM: usize = 100;

/// Draws an item uniformly from those not observed for `(user, query)`.
pub fn sample_negative<R: rand::Rng + ?Sized>(
    corpus: &Corpus,
    user: usize,
    query: usize,
    rng: &mut R,
) -> Result<usize> {
    let n_items = corpus.n_items();
    let positives = corpus.positives(user, query);
    let n_pos = positives.map_or(0, |p| p.len());
    if n_pos >= n_items {
        return Err(Error::ExhaustedNegatives { user, query });
    }
    for _ in 0..NEGATIVE_ATTEMPTS_PER_ITEM * n_items {
        let b = rng.gen_range(0..n_items);
        if !positives.is_some_and(|p| p.contains(&b)) {
            return Ok(b);
        }
    }
    Err(Error::ExhaustedNegatives { user, query })
}

/// Default cap on the number of `(u, q, a, b)` tuples `bpr_objective` enumerates.
pub const ORACLE_PAIR_CAP: usize = 10_000_000;

/// Full BPR-Opt over every pairwise constraint of `train`. Test oracle only.
pub fn bpr_objective(model: &Model, train: &Corpus, lambda: f64) -> Result<f64> {
    bpr_objective_capped(model, train, lambda, ORACLE_PAIR_CAP)
}

pub fn bpr_objective_capped(model: &Model, train: &Corpus, lambda: f64, cap: usize) -> Result<f64> {
    model.dims().check_corpus(train)?;
    let n_items = train.n_items();
    let pairs: usize = train
        .positives_by_user_query()
        .values()
        .map(|p| p.len() * (n_items - p.len()))
        .sum();
    if pairs > cap {
        return Err(Error::OracleScale { pairs, cap });
    }
    let mut keys: Vec<&(usize, usize)> = train.positives_by_user_query().keys().collect();
    keys.sort_unstable();
    let mut total = 0.0;
    for &(u, q) in keys {
        let positives = train.positives(u, q).expect("key from index");
        let scores = model.score_all_items(q, u)?;
        let mut pos: Vec<usize> = positives.iter().copied().collect();
        pos.sort_unstable();
        for a in pos {
            for (b, sb) in scores.iter().enumerate() {
                if !positives.contains(&b) {
                    total += ln_sigmoid(scores[a] - sb);
                }
            }
        }
    }
    let penalty: f64 = model
        .parameters()
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>())
        .sum();
    Ok(total - lambda * penalty)
}

/// Result of one BPR or WARP update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// `f(q,u,a) - f(q,u,b)` before the update.
    pub margin: f64,
    /// Scale applied to the likelihood gradient (`1 - sigma(margin)` for BPR).
    pub scale: f64,
}

/// Gradients of `f(q,u,a) - f(q,u,b)` for one latent-bank sample.
/// `T_b` and `A_b` receive the negated `ta` / `aa`.
pub(crate) struct LatentGrad {
    pub s: Vec<f64>,
    pub v: Vec<f64>,
    pub ta: Vec<f64>,
    pub u: Vec<f64>,
    pub aa: Option<Vec<f64>>,
}

pub(crate) fn latent_grad(bank: &ParamBank, sample: &PairwiseSample) -> LatentGrad {
    let n = bank.n();
    let PairwiseSample { user: u, query: q, pos: a, neg: b } = *sample;
    let s_q = bank.s_row(q);
    let v_u = bank.v_row(u);
    let d: Vec<f64> = bank.t_row(a).iter().zip(bank.t_row(b)).map(|(x, y)| x - y).collect();
    let enc = bank.user_encoder(u);

    let mut gs = vec![0.0; n];
    times_col(enc, &d, &mut gs);
    let mut gv = d.clone();
    let mut gta = vec![0.0; n];
    row_times(s_q, enc, &mut gta);
    gta.iter_mut().zip(v_u).for_each(|(g, v)| *g += v);
    let gu = outer(s_q, &d);

    let aa = match (bank.item_encoder(a), bank.item_encoder(b)) {
        (Some(enc_a), Some(enc_b)) => {
            let diff: Vec<f64> = enc_a.iter().zip(enc_b).map(|(x, y)| x - y).collect();
            let mut buf = vec![0.0; n];
            times_col(&diff, v_u, &mut buf);
            gs.iter_mut().zip(&buf).for_each(|(g, x)| *g += x);
            row_times(s_q, &diff, &mut buf);
            gv.iter_mut().zip(&buf).for_each(|(g, x)| *g += x);
            Some(outer(s_q, v_u))
        }
        _ => None,
    };
    LatentGrad { s: gs, v: gv, ta: gta, u: gu, aa }
}

fn outer(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().flat_map(|xi| y.iter().map(move |yj| xi * yj)).collect()
}

// theta + alpha * (scale * grad - lambda * theta)
fn ascend(theta: &[f64], grad: &[f64], sign: f64, alpha: f64, scale: f64, lambda: f64) -> Vec<f64> {
    theta
        .iter()
        .zip(grad)
        .map(|(t, g)| t + alpha * (sign * scale * g - lambda * t))
        .collect()
}

fn first_nonfinite<'a>(rows: impl IntoIterator<Item = (String, &'a [f64])>) -> Option<String> {
    rows.into_iter().find(|(_, r)| !all_finite(r)).map(|(name, _)| name)
}

fn latent_rows<'a>(bank: &'a ParamBank, s: &PairwiseSample) -> Vec<(String, &'a [f64])> {
    let mut rows = vec![
        (format!("S[{}]", s.query), bank.s_row(s.query)),
        (format!("V[{}]", s.user), bank.v_row(s.user)),
        (format!("T[{}]", s.pos), bank.t_row(s.pos)),
        (format!("T[{}]", s.neg), bank.t_row(s.neg)),
        (format!("U[{}]", s.user), bank.user_encoder(s.user)),
    ];
    if let (Some(ea), Some(eb)) = (bank.item_encoder(s.pos), bank.item_encoder(s.neg)) {
        rows.push((format!("A[{}]", s.pos), ea));
        rows.push((format!("A[{}]", s.neg), eb));
    }
    rows
}

fn check_sample(dims: Dims, s: &PairwiseSample) -> Result<()> {
    dims.check(s.query, s.user, s.pos)?;
    dims.check(s.query, s.user, s.neg)?;
    if s.pos == s.neg {
        return Err(Error::invalid(format!("positive and negative are both item {}", s.pos)));
    }
    Ok(())
}

pub(crate) fn latent_margin(bank: &ParamBank, s: &PairwiseSample) -> Result<f64> {
    let margin = bank.score_unchecked(s.query, s.user, s.pos) - bank.score_unchecked(s.query, s.user, s.neg);
    if !margin.is_finite() {
        let row = first_nonfinite(latent_rows(bank, s))
            .unwrap_or_else(|| format!("score({}, {}, {})", s.query, s.user, s.pos));
        return Err(Error::Divergence(row));
    }
    Ok(margin)
}

/// Simultaneous ascent step on every row touched by `sample`: each row
/// moves by `alpha * (scale * d(margin)/d(row) - lambda * row)`, with all
/// gradients taken at the pre-update values.
pub(crate) fn apply_latent_step(
    bank: &mut ParamBank,
    s: &PairwiseSample,
    alpha: f64,
    scale: f64,
    lambda: f64,
) -> Result<()> {
    let g = latent_grad(bank, s);
    let new_s = ascend(bank.s_row(s.query), &g.s, 1.0, alpha, scale, lambda);
    let new_v = ascend(bank.v_row(s.user), &g.v, 1.0, alpha, scale, lambda);
    let new_ta = ascend(bank.t_row(s.pos), &g.ta, 1.0, alpha, scale, lambda);
    let new_tb = ascend(bank.t_row(s.neg), &g.ta, -1.0, alpha, scale, lambda);
    let new_u = ascend(bank.user_encoder(s.user), &g.u, 1.0, alpha, scale, lambda);
    let new_a = match (&g.aa, bank.item_encoder(s.pos), bank.item_encoder(s.neg)) {
        (Some(ga), Some(ea), Some(eb)) => Some((
            ascend(ea, ga, 1.0, alpha, scale, lambda),
            ascend(eb, ga, -1.0, alpha, scale, lambda),
        )),
        _ => None,
    };

    let mut staged: Vec<(String, &[f64])> = vec![
        (format!("S[{}]", s.query), &new_s),
        (format!("V[{}]", s.user), &new_v),
        (format!("T[{}]", s.pos), &new_ta),
        (format!("T[{}]", s.neg), &new_tb),
        (format!("U[{}]", s.user), &new_u),
    ];
    if let Some((ea, eb)) = &new_a {
        staged.push((format!("A[{}]", s.pos), ea));
        staged.push((format!("A[{}]", s.neg), eb));
    }
    if let Some(row) = first_nonfinite(staged) {
        return Err(Error::Divergence(row));
    }

    bank.s_row_mut(s.query).copy_from_slice(&new_s);
    bank.v_row_mut(s.user).copy_from_slice(&new_v);
    bank.t_row_mut(s.pos).copy_from_slice(&new_ta);
    bank.t_row_mut(s.neg).copy_from_slice(&new_tb);
    bank.user_encoder_mut(s.user).copy_from_slice(&new_u);
    if let Some((ea, eb)) = new_a {
        bank.item_encoder_mut(s.pos).expect("ilcr").copy_from_slice(&ea);
        bank.item_encoder_mut(s.neg).expect("ilcr").copy_from_slice(&eb);
    }
    Ok(())
}

fn bpr_latent(bank: &mut ParamBank, s: &PairwiseSample, cfg: &LearnerConfig) -> Result<StepOutcome> {
    check_sample(bank.dims(), s)?;
    let margin = latent_margin(bank, s)?;
    let scale = 1.0 - sigmoid(margin);
    apply_latent_step(bank, s, cfg.alpha, scale, cfg.lambda)?;
    Ok(StepOutcome { margin, scale })
}

/// One LCR update: S_q, V_u, T_a, T_b and U_u.
pub fn bpr_step_lcr(bank: &mut ParamBank, sample: &PairwiseSample, cfg: &LearnerConfig) -> Result<StepOutcome> {
    if bank.kind() != ModelKind::Lcr {
        return Err(Error::Unsupported(format!("bpr_step_lcr on a {} bank", bank.kind())));
    }
    bpr_latent(bank, sample, cfg)
}

/// One ILCR update: the LCR rows plus the extra item-term contributions to
/// S_q and V_u, and the item encoders A_a, A_b.
pub fn bpr_step_ilcr(bank: &mut ParamBank, sample: &PairwiseSample, cfg: &LearnerConfig) -> Result<StepOutcome> {
    if bank.kind() != ModelKind::Ilcr {
        return Err(Error::Unsupported(format!("bpr_step_ilcr on a {} bank", bank.kind())));
    }
    bpr_latent(bank, sample, cfg)
}

/// One PITF update on the user, query and both items' factor rows.
pub fn bpr_step_pitf(bank: &mut PitfBank, s: &PairwiseSample, cfg: &LearnerConfig) -> Result<StepOutcome> {
    check_sample(bank.dims(), s)?;
    let (u, q, a, b) = (s.user, s.query, s.pos, s.neg);
    let margin = bank.score_unchecked(q, u, a) - bank.score_unchecked(q, u, b);
    let rows = || {
        [
            (format!("user[{u}]"), bank.user_row(u)),
            (format!("query[{q}]"), bank.query_row(q)),
            (format!("item_u[{a}]"), bank.item_user_row(a)),
            (format!("item_u[{b}]"), bank.item_user_row(b)),
            (format!("item_q[{a}]"), bank.item_query_row(a)),
            (format!("item_q[{b}]"), bank.item_query_row(b)),
        ]
    };
    if !margin.is_finite() {
        let row = first_nonfinite(rows()).unwrap_or_else(|| format!("score({q}, {u}, {a})"));
        return Err(Error::Divergence(row));
    }
    let scale = 1.0 - sigmoid(margin);
    let (alpha, lambda) = (cfg.alpha, cfg.lambda);

    let gu: Vec<f64> = bank.item_user_row(a).iter().zip(bank.item_user_row(b)).map(|(x, y)| x - y).collect();
    let gq: Vec<f64> = bank.item_query_row(a).iter().zip(bank.item_query_row(b)).map(|(x, y)| x - y).collect();
    let new_u = ascend(bank.user_row(u), &gu, 1.0, alpha, scale, lambda);
    let new_q = ascend(bank.query_row(q), &gq, 1.0, alpha, scale, lambda);
    let new_iua = ascend(bank.item_user_row(a), bank.user_row(u), 1.0, alpha, scale, lambda);
    let new_iub = ascend(bank.item_user_row(b), bank.user_row(u), -1.0, alpha, scale, lambda);
    let new_iqa = ascend(bank.item_query_row(a), bank.query_row(q), 1.0, alpha, scale, lambda);
    let new_iqb = ascend(bank.item_query_row(b), bank.query_row(q), -1.0, alpha, scale, lambda);
    let staged: [(String, &[f64]); 6] = [
        (format!("user[{u}]"), &new_u),
        (format!("query[{q}]"), &new_q),
        (format!("item_u[{a}]"), &new_iua),
        (format!("item_u[{b}]"), &new_iub),
        (format!("item_q[{a}]"), &new_iqa),
        (format!("item_q[{b}]"), &new_iqb),
    ];
    if let Some(row) = first_nonfinite(staged) {
        return Err(Error::Divergence(row));
    }
    bank.user_row_mut(u).copy_from_slice(&new_u);
    bank.query_row_mut(q).copy_from_slice(&new_q);
    bank.item_user_row_mut(a).copy_from_slice(&new_iua);
    bank.item_user_row_mut(b).copy_from_slice(&new_iub);
    bank.item_query_row_mut(a).copy_from_slice(&new_iqa);
    bank.item_query_row_mut(b).copy_from_slice(&new_iqb);
    Ok(StepOutcome { margin, scale })
}

/// Dispatches a BPR step on whichever bank `model` holds.
pub fn bpr_step(model: &mut Model, sample: &PairwiseSample, cfg: &LearnerConfig) -> Result<StepOutcome> {
    match model {
        Model::Latent(bank) => bpr_latent(bank, sample, cfg),
        Model::Pitf(bank) => bpr_step_pitf(bank, sample, cfg),
        Model::Nmf(_) => Err(Error::Unsupported("NMF is not trained by BPR".into())),
    }
}

/// Indices of the positives visited in one epoch.
pub(crate) fn epoch_order(len: usize, mode: PositiveSampling, rng: &mut seed::Rng) -> Vec<usize> {
    match mode {
        PositiveSampling::Sweep => {
            let mut order: Vec<usize> = (0..len).collect();
            order.shuffle(rng);
            order
        }
        PositiveSampling::Uniform => (0..len).map(|_| rng.gen_range(0..len)).collect(),
    }
}

/// One BPR epoch over `train`, counting draws and sampling time.
pub fn bpr_epoch(
    model: &mut Model,
    train: &Corpus,
    cfg: &LearnerConfig,
    order_rng: &mut seed::Rng,
    negative_rng: &mut seed::Rng,
) -> Result<EpochWork> {
    let mut work = EpochWork::default();
    let triples = train.interactions();
    for idx in epoch_order(triples.len(), cfg.positive_sampling, order_rng) {
        let t = triples[idx];
        let start = Instant::now();
        let neg = sample_negative(train, t.user, t.query, negative_rng)?;
        work.sampling_seconds += start.elapsed().as_secs_f64();
        work.draws += 1;
        let sample = PairwiseSample {
            user: t.user,
            query: t.query,
            pos: t.item,
            neg,
        };
        bpr_step(model, &sample, cfg)?;
        work.steps += 1;
        work.updates += 1;
    }
    Ok(work)
}

/// Initializes a bank from `cfg` and trains it with BPR.
pub fn train_bpr(kind: ModelKind, train: &Corpus, validation: &Corpus, cfg: &LearnerConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let dims = Dims::for_corpus(train, cfg.dim);
    let model = init_bank(kind, dims, cfg.init_low, cfg.init_high, seed::derive(cfg.seed, "init"))?;
    train_bpr_from(model, train, validation, cfg)
}

/// Trains an existing bank with BPR.
pub fn train_bpr_from(model: Model, train: &Corpus, validation: &Corpus, cfg: &LearnerConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    check_inputs(&model, train, validation)?;
    let mut order_rng = seed::rng(seed::derive(cfg.seed, "order"));
    let mut negative_rng = seed::rng(seed::derive(cfg.seed, "negatives"));
    let rule = StopRule {
        max_epochs: cfg.max_epochs,
        patience: cfg.patience,
        eval_k: cfg.eval_k,
    };
    run_epochs(model, validation, rule, |m| {
        bpr_epoch(m, train, cfg, &mut order_rng, &mut negative_rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Interaction;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2.0) - 0.880_797_077_977_882_3).abs() < 1e-6);
        for x in [-700.0, -30.0, -1.5, 0.3, 12.0, 700.0] {
            assert!((sigmoid(x) + sigmoid(-x) - 1.0).abs() <= 1e-15);
            assert!(sigmoid(x).is_finite());
        }
        assert!(sigmoid(f64::NAN).is_nan());
        assert!((ln_sigmoid(-800.0) + 800.0).abs() < 1e-9);
    }

    fn small_corpus(n_items: usize, positives: &[usize]) -> Corpus {
        Corpus::from_index_triples(1, 1, n_items, positives.iter().map(|&a| Interaction::new(0, 0, a))).unwrap()
    }

    #[test]
    fn forced_negative() {
        let corpus = small_corpus(2, &[0]);
        let mut rng = seed::rng(0);
        for _ in 0..50 {
            assert_eq!(sample_negative(&corpus, 0, 0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn negatives_exhausted() {
        let corpus = small_corpus(3, &[0, 1, 2]);
        let mut rng = seed::rng(0);
        assert!(matches!(
            sample_negative(&corpus, 0, 0, &mut rng),
            Err(Error::ExhaustedNegatives { .. })
        ));
    }

    #[test]
    fn negatives_are_uniform_over_complement() {
        let corpus = small_corpus(10, &[0, 1, 2, 3, 4]);
        let mut rng = seed::rng(17);
        let mut counts = [0usize; 10];
        let draws = 100_000;
        for _ in 0..draws {
            counts[sample_negative(&corpus, 0, 0, &mut rng).unwrap()] += 1;
        }
        assert!(counts[..5].iter().all(|&c| c == 0));
        for &c in &counts[5..] {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.2).abs() < 0.01, "{freq}");
        }
    }

    #[test]
    fn objective_on_zero_bank() {
        let corpus = small_corpus(2, &[0]);
        let model = Model::Latent(ParamBank::zeros(ModelKind::Lcr, Dims::new(1, 1, 2, 2)).unwrap());
        let obj = bpr_objective(&model, &corpus, 0.0).unwrap();
        assert!((obj - 0.5f64.ln()).abs() < 1e-15);

        let corpus = Corpus::from_index_triples(
            2,
            2,
            3,
            [(0, 0, 0), (0, 0, 1), (1, 1, 2)].map(|(q, u, a)| Interaction::new(q, u, a)),
        )
        .unwrap();
        let model = Model::Latent(ParamBank::zeros(ModelKind::Ilcr, Dims::new(2, 2, 3, 2)).unwrap());
        // (u0,q0): 2 positives x 1 negative; (u1,q1): 1 x 2.
        let obj = bpr_objective(&model, &corpus, 0.01).unwrap();
        assert!((obj - 4.0 * 0.5f64.ln()).abs() < 1e-12);
        assert!(matches!(
            bpr_objective_capped(&model, &corpus, 0.0, 3),
            Err(Error::OracleScale { pairs: 4, cap: 3 })
        ));
    }

    #[test]
    fn zero_bank_is_fixed_point() {
        let cfg = LearnerConfig {
            alpha: 0.1,
            lambda: 0.3,
            ..Default::default()
        };
        let dims = Dims::new(2, 2, 3, 3);
        let s = PairwiseSample { user: 1, query: 0, pos: 2, neg: 0 };
        for kind in [ModelKind::Lcr, ModelKind::Ilcr] {
            let mut bank = ParamBank::zeros(kind, dims).unwrap();
            let zero = bank.clone();
            let out = bpr_latent(&mut bank, &s, &cfg).unwrap();
            assert_eq!(out.scale, 0.5);
            assert_eq!(bank, zero);
        }
        let mut pitf = PitfBank::zeros(dims);
        bpr_step_pitf(&mut pitf, &s, &cfg).unwrap();
        assert_eq!(pitf, PitfBank::zeros(dims));
    }

    fn random_latent(kind: ModelKind, seed_value: u64) -> ParamBank {
        match init_bank(kind, Dims::new(2, 2, 3, 3), -1.0, 1.0, seed_value).unwrap() {
            Model::Latent(bank) => bank,
            _ => unreachable!(),
        }
    }

    #[test]
    fn equal_items_move_only_item_rows() {
        let cfg = LearnerConfig {
            alpha: 0.1,
            lambda: 0.0,
            ..Default::default()
        };
        let mut bank = random_latent(ModelKind::Lcr, 3);
        let t0 = bank.t_row(0).to_vec();
        bank.t_row_mut(1).copy_from_slice(&t0);
        let before = bank.clone();
        let s = PairwiseSample { user: 0, query: 1, pos: 0, neg: 1 };
        let out = bpr_step_lcr(&mut bank, &s, &cfg).unwrap();
        assert_eq!(out.margin, 0.0);
        assert_eq!(bank.s_row(1), before.s_row(1));
        assert_eq!(bank.v_row(0), before.v_row(0));
        assert_eq!(bank.user_encoder(0), before.user_encoder(0));
        let mut w = vec![0.0; 3];
        row_times(before.s_row(1), before.user_encoder(0), &mut w);
        for i in 0..3 {
            let step = cfg.alpha * 0.5 * (w[i] + before.v_row(0)[i]);
            assert!((bank.t_row(0)[i] - (t0[i] + step)).abs() < 1e-15);
            assert!((bank.t_row(1)[i] - (t0[i] - step)).abs() < 1e-15);
        }
    }

    #[test]
    fn ilcr_equal_items_shrink_by_regularizer() {
        let cfg = LearnerConfig {
            alpha: 0.1,
            lambda: 0.2,
            ..Default::default()
        };
        let mut bank = random_latent(ModelKind::Ilcr, 4);
        let t0 = bank.t_row(0).to_vec();
        bank.t_row_mut(2).copy_from_slice(&t0);
        let a0 = bank.item_encoder(0).unwrap().to_vec();
        bank.item_encoder_mut(2).unwrap().copy_from_slice(&a0);
        let before = bank.clone();
        let s = PairwiseSample { user: 1, query: 0, pos: 0, neg: 2 };
        let out = bpr_step_ilcr(&mut bank, &s, &cfg).unwrap();
        assert_eq!(out.margin, 0.0);
        assert_eq!(out.scale, 0.5);
        let shrink = 1.0 - cfg.alpha * cfg.lambda;
        for (new, old) in bank.s_row(0).iter().zip(before.s_row(0)) {
            assert!((new - shrink * old).abs() < 1e-15);
        }
        for (new, old) in bank.v_row(1).iter().zip(before.v_row(1)) {
            assert!((new - shrink * old).abs() < 1e-15);
        }
        for (new, old) in bank.user_encoder(1).iter().zip(before.user_encoder(1)) {
            assert!((new - shrink * old).abs() < 1e-15);
        }
    }

    #[test]
    fn pitf_equal_items_leave_context_rows() {
        let cfg = LearnerConfig {
            alpha: 0.1,
            lambda: 0.0,
            ..Default::default()
        };
        let Model::Pitf(mut bank) = init_bank(ModelKind::Pitf, Dims::new(2, 2, 3, 3), -1.0, 1.0, 5).unwrap() else {
            unreachable!()
        };
        let (iu, iq) = (bank.item_user_row(0).to_vec(), bank.item_query_row(0).to_vec());
        bank.item_user_row_mut(1).copy_from_slice(&iu);
        bank.item_query_row_mut(1).copy_from_slice(&iq);
        let before = bank.clone();
        let s = PairwiseSample { user: 0, query: 1, pos: 0, neg: 1 };
        bpr_step_pitf(&mut bank, &s, &cfg).unwrap();
        assert_eq!(before.user_row(0), bank.user_row(0));
        assert_eq!(before.query_row(1), bank.query_row(1));
        assert_ne!(before.item_user_row(0), bank.item_user_row(0));
    }

    #[test]
    fn wrong_kind_and_bad_sample() {
        let cfg = LearnerConfig::default();
        let mut bank = ParamBank::zeros(ModelKind::Ilcr, Dims::new(1, 1, 2, 2)).unwrap();
        let s = PairwiseSample { user: 0, query: 0, pos: 0, neg: 1 };
        assert!(bpr_step_lcr(&mut bank, &s, &cfg).is_err());
        let same = PairwiseSample { neg: 0, ..s };
        assert!(bpr_step_ilcr(&mut bank, &same, &cfg).is_err());
    }

    #[test]
    fn divergence_names_row() {
        let cfg = LearnerConfig::default();
        let mut bank = ParamBank::zeros(ModelKind::Lcr, Dims::new(1, 1, 2, 2)).unwrap();
        bank.t_row_mut(1)[0] = f64::NAN;
        let s = PairwiseSample { user: 0, query: 0, pos: 0, neg: 1 };
        match bpr_step_lcr(&mut bank, &s, &cfg) {
            Err(Error::Divergence(row)) => assert_eq!(row, "T[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(LearnerConfig { alpha: 0.0, ..Default::default() }.validate().is_err());
        assert!(LearnerConfig { lambda: -1.0, ..Default::default() }.validate().is_err());
        assert!(LearnerConfig { patience: 0, ..Default::default() }.validate().is_err());
        assert!(LearnerConfig::default().validate().is_ok());
    }
}
