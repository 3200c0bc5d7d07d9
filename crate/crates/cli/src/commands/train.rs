use std::fs;
use std::path::Path;

use cortrieve::config::KvConfig;
use cortrieve::models::{nmf_train, query_item_counts, NmfConfig, NmfModel};
use cortrieve::snapshot::save_model;
use cortrieve::{
    recall_at_k, seed, train_bpr, train_warp, LearnerConfig, Model, ModelKind, PositiveSampling, TrainOutcome,
    WarpConfig,
};

use crate::args::{Learner, TrainArgs};
use crate::commands::{layered_config, load_pair, out_dir, path_from};
use crate::error::{CliError, CliResult};
use crate::manifest::{check_recorded, RunManifest};

fn sampling_name(p: PositiveSampling) -> &'static str {
    match p {
        PositiveSampling::Sweep => "sweep",
        PositiveSampling::Uniform => "uniform",
    }
}

fn create(path: &Path) -> CliResult<fs::File> {
    Ok(fs::File::create(path).map_err(|e| cortrieve::Error::io(path, e))?)
}

fn learner_of(args: &TrainArgs, cfg: &KvConfig) -> CliResult<Learner> {
    if let Some(l) = args.learner {
        return Ok(l);
    }
    match cfg.get_str("learner") {
        None | Some("bpr") => Ok(Learner::Bpr),
        Some("warp") => Ok(Learner::Warp),
        Some(other) => Err(CliError::usage(format!("unknown learner `{other}`"))),
    }
}

pub fn run(args: TrainArgs) -> CliResult {
    let kv = layered_config(&args.hyper)?;
    let model_kind = match args.model {
        Some(m) => m,
        None => kv
            .get::<ModelKind>("model")?
            .ok_or_else(|| CliError::usage("--model is required (or `model=` in the config)"))?,
    };
    let learner = learner_of(&args, &kv)?;
    let train_path = path_from(args.train.clone(), &kv, "train")?;
    let validation_path = path_from(args.validation.clone(), &kv, "validation")?;
    let dir = out_dir(args.out_dir.clone())?;
    check_recorded(&kv, "train", &train_path)?;
    check_recorded(&kv, "validation", &validation_path)?;
    let (train, validation) = load_pair(&train_path, &validation_path)?;

    let mut manifest = RunManifest::new("train");
    manifest.set_config(&kv);
    manifest.set("model", model_kind);
    manifest.set("train", train_path.display());
    manifest.set("validation", validation_path.display());
    manifest.record_input("train", &train_path)?;
    manifest.record_input("validation", &validation_path)?;
    let bank_path = dir.join("bank.bin");
    let manifest_path = dir.join("manifest.txt");
    manifest.record_output("bank", &bank_path);

    if model_kind == ModelKind::Nmf {
        if args.learner.is_some() {
            log::warn!("nmf is fitted in batch; --learner is ignored");
        }
        return run_nmf(&kv, manifest, &train, &validation, &dir, &bank_path, &manifest_path);
    }

    let history_path = dir.join("history.csv");
    manifest.record_output("history", &history_path);
    manifest.set("learner", learner.name());
    let outcome = match learner {
        Learner::Bpr => {
            let cfg = kv.learner_config(LearnerConfig::default())?;
            manifest.set("alpha", cfg.alpha);
            manifest.set("lambda", cfg.lambda);
            manifest.set("n", cfg.dim);
            manifest.set("max_epochs", cfg.max_epochs);
            manifest.set("patience", cfg.patience);
            manifest.set("eval_k", cfg.eval_k);
            manifest.set("seed", cfg.seed);
            manifest.set("init_low", cfg.init_low);
            manifest.set("init_high", cfg.init_high);
            manifest.set("positive_sampling", sampling_name(cfg.positive_sampling));
            record_seeds(&mut manifest, cfg.seed);
            manifest.write(&manifest_path)?;
            train_bpr(model_kind, &train, &validation, &cfg)?
        }
        Learner::Warp => {
            let mut cfg = kv.warp_config(WarpConfig::default())?;
            cfg.record_trace = args.trace;
            manifest.set("alpha", cfg.alpha);
            manifest.set("c", cfg.c);
            manifest.set("n", cfg.dim);
            manifest.set("max_epochs", cfg.max_epochs);
            manifest.set("patience", cfg.patience);
            manifest.set("eval_k", cfg.eval_k);
            manifest.set("seed", cfg.seed);
            manifest.set("init_low", cfg.init_low);
            manifest.set("init_high", cfg.init_high);
            manifest.set("positive_sampling", sampling_name(cfg.positive_sampling));
            if let Some(m) = cfg.max_sampling_attempts {
                manifest.set("max_sampling_attempts", m);
            }
            record_seeds(&mut manifest, cfg.seed);
            let trace_path = dir.join("trace.csv");
            if args.trace {
                manifest.record_output("trace", &trace_path);
            }
            manifest.write(&manifest_path)?;
            let out = train_warp(model_kind, &train, &validation, &cfg)?;
            if args.trace {
                out.write_trace_csv(create(&trace_path)?)?;
            }
            out.train
        }
    };

    save_model(&outcome.model, &bank_path)?;
    outcome.write_history_csv(create(&history_path)?)?;
    report(&outcome);
    Ok(())
}

fn record_seeds(manifest: &mut RunManifest, master: u64) {
    for label in ["init", "order", "negatives"] {
        manifest.record_seed(label, seed::derive(master, label));
    }
}

fn report(outcome: &TrainOutcome) {
    println!("epochs={}", outcome.history.len());
    match (outcome.best_epoch, outcome.best_recall()) {
        (Some(epoch), Some(recall)) => {
            println!("best_epoch={epoch}");
            println!("validation_recall@{}={recall:.6}", outcome.eval_k);
        }
        _ => println!("best_epoch=none"),
    }
}

fn run_nmf(
    kv: &KvConfig,
    mut manifest: RunManifest,
    train: &cortrieve::Corpus,
    validation: &cortrieve::Corpus,
    dir: &Path,
    bank_path: &Path,
    manifest_path: &Path,
) -> CliResult {
    let defaults = NmfConfig::default();
    let cfg = NmfConfig {
        rank: kv.get("n")?.unwrap_or(defaults.rank),
        max_iterations: kv.get("nmf_iterations")?.unwrap_or(defaults.max_iterations),
        tolerance: kv.get("nmf_tolerance")?.unwrap_or(defaults.tolerance),
    };
    let master: u64 = kv.get("seed")?.unwrap_or(0);
    let eval_k: usize = kv.get("eval_k")?.unwrap_or(10);
    if eval_k == 0 {
        return Err(CliError::usage("eval_k must be at least 1"));
    }
    let init_seed = seed::derive(master, "init");
    let errors_path = dir.join("nmf_errors.csv");
    manifest.set("n", cfg.rank);
    manifest.set("nmf_iterations", cfg.max_iterations);
    manifest.set("nmf_tolerance", cfg.tolerance);
    manifest.set("seed", master);
    manifest.set("eval_k", eval_k);
    manifest.record_seed("init", init_seed);
    manifest.record_output("errors", &errors_path);
    manifest.write(manifest_path)?;

    let counts = query_item_counts(train);
    let fit = nmf_train(&counts, train.n_queries(), train.n_items(), &cfg, init_seed)?;
    let mut w = csv::Writer::from_writer(create(&errors_path)?);
    w.write_record(["iteration", "squared_error"]).map_err(cortrieve::Error::from)?;
    for (i, e) in fit.errors.iter().enumerate() {
        w.write_record([i.to_string(), format!("{e:.9}")]).map_err(cortrieve::Error::from)?;
    }
    w.flush().map_err(|e| cortrieve::Error::io(&errors_path, e))?;

    let model = Model::Nmf(NmfModel::from_fit(fit, train.n_users())?);
    save_model(&model, bank_path)?;
    let recall = recall_at_k(&model, validation, &[eval_k])?.recall(eval_k);
    println!("validation_recall@{eval_k}={recall:.6}");
    Ok(())
}
