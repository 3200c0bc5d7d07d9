//! Synthetic corpora generated from a known ground-truth bank.

use crate::corpus::{Corpus, Interaction};
use crate::error::{Error, Result};
use crate::models::{init_bank, Dims, Model, ModelKind, Scorer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedSpec {
    pub kind: ModelKind,
    pub n_queries: usize,
    pub n_users: usize,
    pub n_items: usize,
    pub dim: usize,
    /// Positives per (user, query): the truth's top items.
    pub top_k: usize,
    pub low: f64,
    pub high: f64,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            kind: ModelKind::Ilcr,
            n_queries: 10,
            n_users: 50,
            n_items: 200,
            dim: 5,
            top_k: 20,
            low: -1.0,
            high: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub truth: Model,
    pub corpus: Corpus,
}

/// Draws a truth bank and keeps each (user, query)'s `top_k` items under it
/// (ties to the lower index).
pub fn generate(spec: &PlantedSpec) -> Result<PlantedInstance> {
    if spec.top_k == 0 || spec.top_k >= spec.n_items {
        return Err(Error::invalid(format!(
            "top_k {} must lie in [1, {})",
            spec.top_k, spec.n_items
        )));
    }
    let dims = Dims::new(spec.n_queries, spec.n_users, spec.n_items, spec.dim);
    let truth = init_bank(spec.kind, dims, spec.low, spec.high, spec.seed)?;
    let mut triples = Vec::with_capacity(spec.n_queries * spec.n_users * spec.top_k);
    for u in 0..spec.n_users {
        for q in 0..spec.n_queries {
            let scores = truth.score_all_items(q, u)?;
            let mut order: Vec<usize> = (0..spec.n_items).collect();
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            triples.extend(order[..spec.top_k].iter().map(|&a| Interaction::new(q, u, a)));
        }
    }
    let corpus = Corpus::from_index_triples(spec.n_queries, spec.n_users, spec.n_items, triples)?;
    Ok(PlantedInstance { truth, corpus })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_counts() {
        let spec = PlantedSpec {
            n_queries: 2,
            n_users: 3,
            n_items: 12,
            top_k: 4,
            ..Default::default()
        };
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.corpus.len(), 2 * 3 * 4);
        for u in 0..3 {
            for q in 0..2 {
                let pos = inst.corpus.positives(u, q).unwrap();
                assert_eq!(pos.len(), 4);
                let scores = inst.truth.score_all_items(q, u).unwrap();
                let floor = pos.iter().map(|&a| scores[a]).fold(f64::INFINITY, f64::min);
                let above = scores.iter().filter(|&&s| s > floor).count();
                assert!(above < 4);
            }
        }
    }
}
