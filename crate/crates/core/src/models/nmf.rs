//! Query-item NMF baseline fitted with Lee-Seung multiplicative updates
//! under squared Frobenius loss. Scores ignore the user.

use rand::distributions::{Distribution, Uniform};

use super::{Dims, Scorer};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmfConfig {
    pub rank: usize,
    pub max_iterations: usize,
    /// Stop once the relative error decrease falls below this.
    pub tolerance: f64,
}

impl Default for NmfConfig {
    fn default() -> Self {
        NmfConfig {
            rank: 10,
            max_iterations: 200,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmfFit {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// `rows x rank`, row-major.
    pub w: Vec<f64>,
    /// `rank x cols`, row-major.
    pub h: Vec<f64>,
    /// Squared Frobenius error at initialization and after each iteration.
    pub errors: Vec<f64>,
}

/// `|Q| x |A|` matrix of triple counts, summed over users.
pub fn query_item_counts(corpus: &Corpus) -> Vec<f64> {
    let cols = corpus.n_items();
    let mut counts = vec![0.0; corpus.n_queries() * cols];
    for t in corpus.interactions() {
        counts[t.query * cols + t.item] += 1.0;
    }
    counts
}

fn product(w: &[f64], h: &[f64], rows: usize, cols: usize, rank: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for k in 0..rank {
            let wik = w[i * rank + k];
            if wik == 0.0 {
                continue;
            }
            for (o, hk) in out[i * cols..(i + 1) * cols].iter_mut().zip(&h[k * cols..(k + 1) * cols]) {
                *o += wik * hk;
            }
        }
    }
    out
}

fn sq_error(target: &[f64], approx: &[f64]) -> f64 {
    target.iter().zip(approx).map(|(x, y)| (x - y) * (x - y)).sum()
}

// x <- x * num / den, leaving x alone where den vanishes.
fn multiplicative(x: &mut [f64], num: &[f64], den: &[f64]) {
    for ((x, n), d) in x.iter_mut().zip(num).zip(den) {
        if *d > 0.0 {
            *x *= n / d;
        }
    }
}

/// Factorizes a nonnegative `rows x cols` matrix as `W H`.
pub fn nmf_train(matrix: &[f64], rows: usize, cols: usize, cfg: &NmfConfig, seed_value: u64) -> Result<NmfFit> {
    let rank = cfg.rank;
    if rank < 1 {
        return Err(Error::invalid("NMF rank must be at least 1"));
    }
    if matrix.len() != rows * cols {
        return Err(Error::ShapeMismatch {
            left: format!("{} entries", matrix.len()),
            right: format!("{rows}x{cols}"),
        });
    }
    if let Some(bad) = matrix.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::invalid(format!("NMF input entry {bad} is not nonnegative")));
    }

    let mean = if matrix.is_empty() {
        0.0
    } else {
        matrix.iter().sum::<f64>() / matrix.len() as f64
    };
    let scale = (mean / rank as f64).sqrt().max(1e-3);
    let dist = Uniform::new(0.0, scale);
    let mut rng = seed::rng(seed_value);
    let mut w: Vec<f64> = (0..rows * rank).map(|_| dist.sample(&mut rng)).collect();
    let mut h: Vec<f64> = (0..rank * cols).map(|_| dist.sample(&mut rng)).collect();

    let mut errors = vec![sq_error(matrix, &product(&w, &h, rows, cols, rank))];
    for _ in 0..cfg.max_iterations {
        // H <- H * (W'X) / (W'W H)
        let mut wtx = vec![0.0; rank * cols];
        let mut wtw = vec![0.0; rank * rank];
        for i in 0..rows {
            for k in 0..rank {
                let wik = w[i * rank + k];
                for j in 0..cols {
                    wtx[k * cols + j] += wik * matrix[i * cols + j];
                }
                for l in 0..rank {
                    wtw[k * rank + l] += wik * w[i * rank + l];
                }
            }
        }
        let wtwh = product(&wtw, &h, rank, cols, rank);
        multiplicative(&mut h, &wtx, &wtwh);

        // W <- W * (X H') / (W H H')
        let mut xht = vec![0.0; rows * rank];
        let mut hht = vec![0.0; rank * rank];
        for k in 0..rank {
            for j in 0..cols {
                let hkj = h[k * cols + j];
                for i in 0..rows {
                    xht[i * rank + k] += matrix[i * cols + j] * hkj;
                }
                for l in 0..rank {
                    hht[k * rank + l] += hkj * h[l * cols + j];
                }
            }
        }
        let whht = product(&w, &hht, rows, rank, rank);
        multiplicative(&mut w, &xht, &whht);

        let err = sq_error(matrix, &product(&w, &h, rows, cols, rank));
        let prev = *errors.last().unwrap();
        errors.push(err);
        if prev > 0.0 && (prev - err) / prev < cfg.tolerance {
            break;
        }
        if err == 0.0 {
            break;
        }
    }
    Ok(NmfFit {
        rows,
        cols,
        rank,
        w,
        h,
        errors,
    })
}

/// NMF scorer over the query-item matrix; `score(q, u, a) = (W H)[q, a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NmfModel {
    dims: Dims,
    w: Vec<f64>,
    h: Vec<f64>,
}

impl NmfModel {
    /// Fits the query-item counts of `corpus`.
    pub fn fit(corpus: &Corpus, cfg: &NmfConfig, seed_value: u64) -> Result<Self> {
        let counts = query_item_counts(corpus);
        let fit = nmf_train(&counts, corpus.n_queries(), corpus.n_items(), cfg, seed_value)?;
        NmfModel::from_fit(fit, corpus.n_users())
    }

    pub fn from_fit(fit: NmfFit, n_users: usize) -> Result<Self> {
        NmfModel::from_parts(Dims::new(fit.rows, n_users, fit.cols, fit.rank), fit.w, fit.h)
    }

    pub fn from_parts(dims: Dims, w: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if w.len() != dims.n_queries * dims.n || h.len() != dims.n * dims.n_items {
            return Err(Error::ShapeMismatch {
                left: format!("W {} / H {} entries", w.len(), h.len()),
                right: format!("{dims}"),
            });
        }
        Ok(NmfModel { dims, w, h })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    fn score_unchecked(&self, q: usize, a: usize) -> f64 {
        let rank = self.dims.n;
        let cols = self.dims.n_items;
        (0..rank).map(|k| self.w[q * rank + k] * self.h[k * cols + a]).sum()
    }
}

impl Scorer for NmfModel {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn score(&self, q: usize, u: usize, a: usize) -> Result<f64> {
        self.dims.check(q, u, a)?;
        Ok(self.score_unchecked(q, a))
    }

    fn score_all_items(&self, q: usize, u: usize) -> Result<Vec<f64>> {
        self.dims.check(q, u, 0)?;
        Ok((0..self.dims.n_items).map(|a| self.score_unchecked(q, a)).collect())
    }
}
