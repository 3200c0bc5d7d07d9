//! Shared fixtures for the criterion benches.

use cortrieve::planted::{generate, PlantedInstance, PlantedSpec};
use cortrieve::{init_bank, Dims, Model, ModelKind, Result};

/// Planted corpus with `n_items` items, ten queries and fifty users.
pub fn planted(kind: ModelKind, n_items: usize, seed: u64) -> Result<PlantedInstance> {
    generate(&PlantedSpec {
        kind,
        n_items,
        top_k: 5.min(n_items - 1),
        seed,
        ..PlantedSpec::default()
    })
}

/// Freshly initialized bank shaped like `instance`'s corpus.
pub fn fresh_bank(kind: ModelKind, instance: &PlantedInstance, dim: usize) -> Result<Model> {
    init_bank(kind, Dims::for_corpus(&instance.corpus, dim), -0.02, 0.02, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cortrieve::Scorer;

    #[test]
    fn fixtures_agree_in_shape() {
        let inst = planted(ModelKind::Lcr, 40, 0).unwrap();
        let bank = fresh_bank(ModelKind::Lcr, &inst, 5).unwrap();
        assert_eq!(bank.dims().n_items, 40);
        assert!(bank.dims().check_corpus(&inst.corpus).is_ok());
    }
}
