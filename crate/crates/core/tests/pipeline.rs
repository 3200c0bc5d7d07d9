use std::fs;
use std::path::Path;

use cortrieve::config::KvConfig;
use cortrieve::models::{NmfConfig, NmfModel};
use cortrieve::snapshot::{load_corpus, load_model, save_corpus, save_model};
use cortrieve::*;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn triple_log() -> String {
    let mut text = String::from("#user\titem\tquery\n");
    for u in 0..6 {
        for a in 0..10 {
            if (u + a) % 3 == 0 {
                text.push_str(&format!("u{u}\ta{a}\tq{}\n", a % 2));
            }
        }
    }
    text
}

#[test]
fn ingest_split_train_save_reload_eval() {
    let dir = tempfile::tempdir().unwrap();
    let log = write(dir.path(), "triples.tsv", &triple_log());
    let corpus = ingest_tsv(&log, "user,item,query".parse().unwrap()).unwrap();
    assert_eq!(corpus.n_users(), 6);
    assert_eq!(corpus.n_items(), 10);
    assert_eq!(corpus.n_queries(), 2);

    let (train, validation, test) = split(&corpus, &SplitSpec::new(0.6, 0.2, 0.2, 3).unwrap()).unwrap();
    for (name, part) in [("train.bin", &train), ("validation.tsv", &validation)] {
        let path = dir.path().join(name);
        save_corpus(part, &path).unwrap();
        let back = load_corpus(&path).unwrap();
        assert_eq!(back.interactions(), part.interactions());
        assert_eq!(back.vocab(), part.vocab());
    }

    let cfg = LearnerConfig {
        max_epochs: 5,
        dim: 3,
        ..Default::default()
    };
    let out = train_bpr(ModelKind::Ilcr, &train, &validation, &cfg).unwrap();
    let bank = dir.path().join("bank.bin");
    save_model(&out.model, &bank).unwrap();
    let reloaded = load_model(&bank).unwrap();
    let ks = [1, 5, 10];
    assert_eq!(
        recall_at_k(&out.model, &test, &ks).unwrap(),
        recall_at_k(&reloaded, &test, &ks).unwrap()
    );

    let mut csv = Vec::new();
    out.write_history_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("epoch,recall_at_10,seconds,negative_draws,"));
    assert_eq!(text.lines().count(), out.history.len() + 1);
}

#[test]
fn mismatched_bank_and_corpus() {
    let model = init_bank(ModelKind::Lcr, Dims::new(2, 2, 3, 2), -0.1, 0.1, 0).unwrap();
    let test = Corpus::from_index_triples(2, 2, 5, [Interaction::new(0, 0, 4)]).unwrap();
    let err = recall_at_k(&model, &test, &[5]).unwrap_err();
    assert!(matches!(err, Error::ShapeMismatch { .. }), "{err}");
}

#[test]
fn lastfm_and_yelp_files() {
    let dir = tempfile::tempdir().unwrap();
    let tags = write(
        dir.path(),
        "user_taggedartists.dat",
        "userID\tartistID\ttagID\tday\tmonth\tyear\n1\t10\trock\t1\t1\t2008\n1\t10\tindie\t1\t1\t2008\n2\t11\trock\t1\t1\t2008\n3\t12\tpolka\t1\t1\t2008\n",
    );
    let listens = write(
        dir.path(),
        "user_artists.dat",
        "userID\tartistID\tweight\n1\t10\t5\n2\t10\t3\n2\t11\t1\n4\t13\t9\n",
    );
    let corpus = ingest_lastfm(&tags, &listens, 2).unwrap();
    let stats = corpus.stats();
    // (indie,1,10) (rock,1,10) from own tags, (indie,2,10) (rock,2,10)
    // inherited, (rock,2,11) own; artist 13 has no tags.
    assert_eq!(stats.samples, 5);
    assert_eq!(stats.queries, 2);
    assert!(stats.to_string().contains("queries=2"));

    let reviews = write(dir.path(), "reviews.tsv", "u1\tb1\nu1\tb2\nu2\tb1\n");
    let categories = write(dir.path(), "categories.tsv", "b1\tFood\nb1\tBars\nb2\tFood\n");
    let yelp = ingest_yelp(&reviews, &categories, 2).unwrap();
    assert_eq!(yelp.len(), 3);
    assert_eq!(yelp.n_users(), 1);
}

#[test]
fn config_file_drives_learners() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "run.cfg", "# ilcr run\nalpha=0.04\nlambda=0.01\nn=10\nc=2.5\nmax_sampling_attempts=50\n");
    let kv = KvConfig::load(&path).unwrap();
    let bpr = kv.learner_config(LearnerConfig::default()).unwrap();
    assert_eq!((bpr.alpha, bpr.lambda, bpr.dim), (0.04, 0.01, 10));
    let warp = kv.warp_config(WarpConfig::default()).unwrap();
    assert_eq!((warp.c, warp.max_sampling_attempts), (2.5, Some(50)));
    assert!(KvConfig::load(&dir.path().join("missing.cfg")).is_err());
}

#[test]
fn nmf_baseline_ranks_frequent_items() {
    let triples = [(0, 0, 1), (0, 1, 1), (0, 2, 1), (0, 0, 2), (1, 1, 3), (1, 2, 3), (1, 0, 0)]
        .map(|(q, u, a)| Interaction::new(q, u, a));
    let corpus = Corpus::from_index_triples(2, 3, 4, triples).unwrap();
    let model = NmfModel::fit(
        &corpus,
        &NmfConfig {
            rank: 2,
            max_iterations: 500,
            tolerance: 0.0,
        },
        1,
    )
    .unwrap();
    let scores = model.score_all_items(0, 0).unwrap();
    let best = (0..4).max_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
    assert_eq!(best, 1);
    let wrapped = Model::Nmf(model);
    assert!(bpr_step(
        &mut wrapped.clone(),
        &PairwiseSample { user: 0, query: 0, pos: 1, neg: 0 },
        &LearnerConfig::default()
    )
    .is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nmf.bin");
    save_model(&wrapped, &path).unwrap();
    assert_eq!(load_model(&path).unwrap().score(0, 2, 1).unwrap(), wrapped.score(0, 2, 1).unwrap());
}
