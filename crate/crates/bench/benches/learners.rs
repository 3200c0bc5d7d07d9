use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use cortrieve::{bpr_step, warp_step, LearnerConfig, Model, ModelKind, PairwiseSample, WarpConfig};
use cortrieve_bench::{fresh_bank, planted};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for n_items in [100, 1000] {
        let inst = planted(ModelKind::Lcr, n_items, 0).unwrap();
        let positives = inst.corpus.interactions().to_vec();

        let bpr_cfg = LearnerConfig {
            dim: 5,
            ..Default::default()
        };
        let mut model = fresh_bank(ModelKind::Lcr, &inst, 5).unwrap();
        let mut i = 0;
        group.bench_function(BenchmarkId::new("bpr", n_items), |b| {
            b.iter(|| {
                let p = positives[i % positives.len()];
                i += 1;
                let sample = PairwiseSample {
                    user: p.user,
                    query: p.query,
                    pos: p.item,
                    neg: (p.item + 1) % n_items,
                };
                black_box(bpr_step(&mut model, &sample, &bpr_cfg).unwrap())
            })
        });

        let warp_cfg = WarpConfig {
            dim: 5,
            alpha: 0.01,
            c: 10.0,
            ..Default::default()
        };
        let Model::Latent(mut bank) = fresh_bank(ModelKind::Lcr, &inst, 5).unwrap() else {
            unreachable!()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut j = 0;
        group.bench_function(BenchmarkId::new("warp", n_items), |b| {
            b.iter(|| {
                let p = positives[j % positives.len()];
                j += 1;
                black_box(warp_step(&mut bank, p.query, p.user, p.item, &warp_cfg, &mut rng).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, steps);
criterion_main!(benches);
