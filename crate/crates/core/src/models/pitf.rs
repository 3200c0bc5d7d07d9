use rand::distributions::Uniform;

use super::{uniform_fill, Dims, Scorer};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::seed;

/// Pairwise-interaction tensor factorization with the user-query
/// interaction removed: `score = u_u . i^U_a + q_q . i^Q_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PitfBank {
    dims: Dims,
    pub(crate) u_emb: Vec<f64>,
    pub(crate) q_emb: Vec<f64>,
    pub(crate) i_emb_u: Vec<f64>,
    pub(crate) i_emb_q: Vec<f64>,
}

impl PitfBank {
    pub fn zeros(dims: Dims) -> Self {
        let n = dims.n;
        PitfBank {
            dims,
            u_emb: vec![0.0; dims.n_users * n],
            q_emb: vec![0.0; dims.n_queries * n],
            i_emb_u: vec![0.0; dims.n_items * n],
            i_emb_q: vec![0.0; dims.n_items * n],
        }
    }

    pub(crate) fn random(dims: Dims, dist: &Uniform<f64>, rng: &mut seed::Rng) -> Self {
        let n = dims.n;
        let u_emb = uniform_fill(dims.n_users * n, dist, rng);
        let q_emb = uniform_fill(dims.n_queries * n, dist, rng);
        let i_emb_u = uniform_fill(dims.n_items * n, dist, rng);
        let i_emb_q = uniform_fill(dims.n_items * n, dist, rng);
        PitfBank {
            dims,
            u_emb,
            q_emb,
            i_emb_u,
            i_emb_q,
        }
    }

    pub fn from_parts(
        dims: Dims,
        u_emb: Vec<f64>,
        q_emb: Vec<f64>,
        i_emb_u: Vec<f64>,
        i_emb_q: Vec<f64>,
    ) -> Result<Self> {
        let n = dims.n;
        for (name, got, want) in [
            ("user", u_emb.len(), dims.n_users * n),
            ("query", q_emb.len(), dims.n_queries * n),
            ("item/user", i_emb_u.len(), dims.n_items * n),
            ("item/query", i_emb_q.len(), dims.n_items * n),
        ] {
            if got != want {
                return Err(Error::ShapeMismatch {
                    left: format!("{name} factors have {got} entries"),
                    right: format!("{want} expected for {dims}"),
                });
            }
        }
        Ok(PitfBank {
            dims,
            u_emb,
            q_emb,
            i_emb_u,
            i_emb_q,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn u_emb(&self) -> &[f64] {
        &self.u_emb
    }

    pub fn q_emb(&self) -> &[f64] {
        &self.q_emb
    }

    pub fn user_row(&self, u: usize) -> &[f64] {
        let n = self.dims.n;
        &self.u_emb[u * n..(u + 1) * n]
    }

    pub fn query_row(&self, q: usize) -> &[f64] {
        let n = self.dims.n;
        &self.q_emb[q * n..(q + 1) * n]
    }

    pub fn item_user_row(&self, a: usize) -> &[f64] {
        let n = self.dims.n;
        &self.i_emb_u[a * n..(a + 1) * n]
    }

    pub fn item_query_row(&self, a: usize) -> &[f64] {
        let n = self.dims.n;
        &self.i_emb_q[a * n..(a + 1) * n]
    }

    pub fn item_user_row_mut(&mut self, a: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.i_emb_u[a * n..(a + 1) * n]
    }

    pub fn item_query_row_mut(&mut self, a: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.i_emb_q[a * n..(a + 1) * n]
    }

    pub fn user_row_mut(&mut self, u: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.u_emb[u * n..(u + 1) * n]
    }

    pub fn query_row_mut(&mut self, q: usize) -> &mut [f64] {
        let n = self.dims.n;
        &mut self.q_emb[q * n..(q + 1) * n]
    }

    pub fn parameters(&self) -> Vec<&[f64]> {
        vec![&self.u_emb, &self.q_emb, &self.i_emb_u, &self.i_emb_q]
    }

    pub(crate) fn score_unchecked(&self, q: usize, u: usize, a: usize) -> f64 {
        dot(self.user_row(u), self.item_user_row(a)) + dot(self.query_row(q), self.item_query_row(a))
    }

    pub fn score_pitf(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        self.dims.check(q, u, a)?;
        Ok(self.score_unchecked(q, u, a))
    }
}

impl Scorer for PitfBank {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn score(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        self.score_pitf(q, u, a)
    }

    fn score_all_items(&self, q: usize, u: usize) -> Result<Vec<f64>> {
        self.dims.check(q, u, 0)?;
        Ok((0..self.dims.n_items)
            .map(|a| self.score_unchecked(q, u, a))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_oracle() {
        let bank = PitfBank::from_parts(Dims::new(1, 1, 1, 1), vec![2.0], vec![4.0], vec![3.0], vec![5.0])
            .unwrap();
        // 2*3 + 4*5
        assert_eq!(bank.score_pitf(0, 0, 0).unwrap(), 26.0);
        assert_eq!(PitfBank::zeros(Dims::new(2, 2, 2, 3)).score_pitf(1, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn zero_query_factors_make_scores_query_invariant() {
        let dims = Dims::new(4, 2, 6, 3);
        let mut rng = seed::rng(1);
        let mut bank = PitfBank::random(dims, &Uniform::new(-1.0, 1.0), &mut rng);
        bank.i_emb_q.fill(0.0);
        let reference = bank.score_all_items(0, 1).unwrap();
        for q in 1..4 {
            assert_eq!(bank.score_all_items(q, 1).unwrap(), reference);
        }
    }

    #[test]
    fn out_of_range() {
        let bank = PitfBank::zeros(Dims::new(1, 1, 1, 1));
        assert!(bank.score_pitf(1, 0, 0).is_err());
        assert!(bank.score_all_items(0, 3).is_err());
    }
}
