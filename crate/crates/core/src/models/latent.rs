use rand::distributions::Uniform;

use super::{uniform_fill, Dims, ModelKind, Scorer};
use crate::error::{Error, Result};
use crate::linalg::{dot, row_times};
use crate::seed;

/// Trainable tensors of an LCR or ILCR model.
///
/// Embeddings are rows (`S` is `|Q| x n`, `V` is `|U| x n`, `T` is
/// `|A| x n`); every user owns an `n x n` encoder `U_u`, and ILCR banks
/// additionally give every item an `n x n` encoder `A_a`. Encoders multiply
/// row vectors from the right. All storage is dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBank {
    kind: ModelKind,
    dims: Dims,
    pub(crate) s: Vec<f64>,
    pub(crate) v: Vec<f64>,
    pub(crate) t: Vec<f64>,
    pub(crate) user_enc: Vec<f64>,
    pub(crate) item_enc: Option<Vec<f64>>,
}

impl ParamBank {
    pub fn zeros(kind: ModelKind, dims: Dims) -> Result<Self> {
        let with_items = match kind {
            ModelKind::Lcr => false,
            ModelKind::Ilcr => true,
            other => return Err(Error::Unsupported(format!("{other} has no latent bank"))),
        };
        let n = dims.n;
        Ok(ParamBank {
            kind,
            dims,
            s: vec![0.0; dims.n_queries * n],
            v: vec![0.0; dims.n_users * n],
            t: vec![0.0; dims.n_items * n],
            user_enc: vec![0.0; dims.n_users * n * n],
            item_enc: with_items.then(|| vec![0.0; dims.n_items * n * n]),
        })
    }

    pub(crate) fn random(
        kind: ModelKind,
        dims: Dims,
        dist: &Uniform<f64>,
        rng: &mut seed::Rng,
    ) -> Self {
        let n = dims.n;
        let s = uniform_fill(dims.n_queries * n, dist, rng);
        let v = uniform_fill(dims.n_users * n, dist, rng);
        let t = uniform_fill(dims.n_items * n, dist, rng);
        let user_enc = uniform_fill(dims.n_users * n * n, dist, rng);
        let item_enc =
            (kind == ModelKind::Ilcr).then(|| uniform_fill(dims.n_items * n * n, dist, rng));
        ParamBank {
            kind,
            dims,
            s,
            v,
            t,
            user_enc,
            item_enc,
        }
    }

    /// Assembles a bank from raw row-major buffers, checking every length.
    pub fn from_parts(
        kind: ModelKind,
        dims: Dims,
        s: Vec<f64>,
        v: Vec<f64>,
        t: Vec<f64>,
        user_enc: Vec<f64>,
        item_enc: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = dims.n;
        let expect = |name: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(Error::ShapeMismatch {
                    left: format!("{name} has {got} entries"),
                    right: format!("{want} expected for {dims}"),
                })
            }
        };
        expect("S", s.len(), dims.n_queries * n)?;
        expect("V", v.len(), dims.n_users * n)?;
        expect("T", t.len(), dims.n_items * n)?;
        expect("U", user_enc.len(), dims.n_users * n * n)?;
        match (kind, &item_enc) {
            (ModelKind::Lcr, None) => {}
            (ModelKind::Ilcr, Some(a)) => expect("A", a.len(), dims.n_items * n * n)?,
            _ => {
                return Err(Error::invalid(format!(
                    "{kind} bank item encoders present={}",
                    item_enc.is_some()
                )))
            }
        }
        Ok(ParamBank {
            kind,
            dims,
            s,
            v,
            t,
            user_enc,
            item_enc,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.n
    }

    pub fn has_item_encoders(&self) -> bool {
        self.item_enc.is_some()
    }

    pub fn s_row(&self, q: usize) -> &[f64] {
        let n = self.dims.n;
        &self.s[q * n..(q + 1) * n]
    }

    pub fn v_row(&self, u: usize) -> &[f64] {
        let n = self.dims.n;
        &self.v[u * n..(u + 1) * n]
    }

    pub fn t_row(&self, a: usize) -> &[f64] {
        let n = self.dims.n;
        &self.t[a * n..(a + 1) * n]
    }

    pub fn user_encoder(&self, u: usize) -> &[f64] {
        let nn = self.dims.n * self.dims.n;
        &self.user_enc[u * nn..(u + 1) * nn]
    }

    pub fn item_encoder(&self, a: usize) -> Option<&[f64]> {
        let nn = self.dims.n * self.dims.n;
        self.item_enc.as_ref().map(|e| &e[a * nn..(a + 1) * nn])
    }

    pub fn s_row_mut(&mut self, q: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.s[q * n..(q + 1) * n]
    }

    pub fn v_row_mut(&mut self, u: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.v[u * n..(u + 1) * n]
    }

    pub fn t_row_mut(&mut self, a: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.t[a * n..(a + 1) * n]
    }

    pub fn user_encoder_mut(&mut self, u: usize) -> &mut [f64] {
        let nn = self.dims.n * self.dims.n;
        &mut self.user_enc[u * nn..(u + 1) * nn]
    }

    pub fn item_encoder_mut(&mut self, a: usize) -> Option<&mut [f64]> {
        let nn = self.dims.n * self.dims.n;
        self.item_enc.as_mut().map(|e| &mut e[a * nn..(a + 1) * nn])
    }

    /// Zeroes every item encoder, turning an ILCR bank into its LCR part.
    pub fn clear_item_encoders(&mut self) {
        if let Some(enc) = self.item_enc.as_mut() {
            enc.fill(0.0);
        }
    }

    /// A copy without item encoders, scored as LCR.
    pub fn to_lcr(&self) -> ParamBank {
        ParamBank {
            kind: ModelKind::Lcr,
            item_enc: None,
            ..self.clone()
        }
    }

    pub fn parameters(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.s, &self.v, &self.t, &self.user_enc];
        if let Some(a) = &self.item_enc {
            out.push(a);
        }
        out
    }

    /// `S_q U_u`, the query row mapped through the user's encoder.
    pub(crate) fn query_user_row(&self, q: usize, u: usize, out: &mut [f64]) {
        row_times(self.s_row(q), self.user_encoder(u), out);
    }

    pub(crate) fn lcr_with(&self, su: &[f64], u: usize, a: usize) -> f64 {
        let t = self.t_row(a);
        dot(su, t) + dot(self.v_row(u), t)
    }

    pub(crate) fn item_term_with(&self, q: usize, u: usize, a: usize, buf: &mut [f64]) -> f64 {
        match self.item_encoder(a) {
            Some(enc) => {
                row_times(self.s_row(q), enc, buf);
                dot(buf, self.v_row(u))
            }
            None => 0.0,
        }
    }

    /// `S_q U_u T_a' + V_u T_a'` without bounds checks beyond slicing.
    pub(crate) fn lcr_unchecked(&self, q: usize, u: usize, a: usize) -> f64 {
        let mut su = vec![0.0; self.dims.n];
        self.query_user_row(q, u, &mut su);
        self.lcr_with(&su, u, a)
    }

    pub(crate) fn score_unchecked(&self, q: usize, u: usize, a: usize) -> f64 {
        let mut su = vec![0.0; self.dims.n];
        self.query_user_row(q, u, &mut su);
        let lcr = self.lcr_with(&su, u, a);
        if self.kind == ModelKind::Ilcr {
            lcr + self.item_term_with(q, u, a, &mut su)
        } else {
            lcr
        }
    }

    /// Latent collaborative retrieval score `S_q U_u T_a' + V_u T_a'`.
    /// On an ILCR bank this ignores the item encoders.
    pub fn score_lcr(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        self.dims.check(q, u, a)?;
        Ok(self.lcr_unchecked(q, u, a))
    }

    /// Item-based bilinear term `S_q A_a V_u'`.
    pub fn score_item_term(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        if self.item_enc.is_none() {
            return Err(Error::Unsupported(format!(
                "{} bank has no item encoders",
                self.kind
            )));
        }
        self.dims.check(q, u, a)?;
        let mut buf = vec![0.0; self.dims.n];
        Ok(self.item_term_with(q, u, a, &mut buf))
    }

    /// `score_lcr + score_item_term`.
    pub fn score_ilcr(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        let lcr = self.score_lcr(q, u, a)?;
        Ok(lcr + self.score_item_term(q, u, a)?)
    }

    /// Scores into `out` using `su` and `buf` as scratch (each length `n`).
    pub(crate) fn fill_scores(&self, q: usize, u: usize, su: &mut [f64], buf: &mut [f64], out: &mut [f64]) {
        self.query_user_row(q, u, su);
        let ilcr = self.kind == ModelKind::Ilcr;
        for (a, slot) in out.iter_mut().enumerate() {
            let lcr = self.lcr_with(su, u, a);
            *slot = if ilcr {
                lcr + self.item_term_with(q, u, a, buf)
            } else {
                lcr
            };
        }
    }
}

impl Scorer for ParamBank {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn score(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        match self.kind {
            ModelKind::Ilcr => self.score_ilcr(q, u, a),
            _ => self.score_lcr(q, u, a),
        }
    }

    fn score_all_items(&self, q: usize, u: usize) -> Result<Vec<f64>> {
        self.dims.check(q, u, 0)?;
        let n = self.dims.n;
        let mut out = vec![0.0; self.dims.n_items];
        let (mut su, mut buf) = (vec![0.0; n], vec![0.0; n]);
        self.fill_scores(q, u, &mut su, &mut buf, &mut out);
        Ok(out)
    }
}
