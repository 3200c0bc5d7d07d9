use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cortrieve::eval::ComparisonRow;
use cortrieve::{compare_learners, seed, LearnerConfig, ModelKind, WarpConfig};

use crate::args::BenchArgs;
use crate::commands::{layered_config, load_pair, out_dir, path_from};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

const DEFAULT_EVAL_K: usize = 30;

/// Per-repeat (seconds, draws, recall) keyed by (learner, epoch).
type Cells = BTreeMap<(&'static str, usize), Vec<(f64, f64, f64)>>;

/// Sample mean and standard deviation (zero for a single value).
fn mean_stdev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| cortrieve::Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn run(args: BenchArgs) -> CliResult {
    if args.repeats == 0 {
        return Err(CliError::usage("--repeats must be at least 1"));
    }
    let mut kv = layered_config(&args.hyper)?;
    if kv.get_str("eval_k").is_none() {
        kv.set("eval_k", DEFAULT_EVAL_K);
    }
    let kind = match args.model {
        Some(m) => m,
        None => kv.get::<ModelKind>("model")?.unwrap_or(ModelKind::Lcr),
    };
    let train_path = path_from(args.train.clone(), &kv, "train")?;
    let validation_path = path_from(args.validation.clone(), &kv, "validation")?;
    let (train, validation) = load_pair(&train_path, &validation_path)?;
    let bpr_base = kv.learner_config(LearnerConfig::default())?;
    let mut warp_base = kv.warp_config(WarpConfig::default())?;
    if let Some(a) = args.warp_alpha.or(kv.get("warp_alpha")?) {
        warp_base.alpha = a;
    }
    warp_base.validate()?;
    let dir = out_dir(args.out_dir.clone())?;

    let mut manifest = RunManifest::new("bench");
    manifest.set_config(&kv);
    manifest.set("model", kind);
    manifest.set("train", train_path.display());
    manifest.set("validation", validation_path.display());
    manifest.set("alpha", bpr_base.alpha);
    manifest.set("warp_alpha", warp_base.alpha);
    manifest.set("lambda", bpr_base.lambda);
    manifest.set("c", warp_base.c);
    manifest.set("n", bpr_base.dim);
    manifest.set("repeats", args.repeats);
    manifest.record_input("train", &train_path)?;
    manifest.record_input("validation", &validation_path)?;
    let summary_path = dir.join("bench.csv");
    let long_path = dir.join("bench_long.csv");
    manifest.record_output("summary", &summary_path);
    if args.long {
        manifest.record_output("long", &long_path);
    }
    let repeat_seeds: Vec<u64> = (0..args.repeats as u64)
        .map(|i| seed::derive_indexed(bpr_base.seed, "repeat", i))
        .collect();
    for (i, s) in repeat_seeds.iter().enumerate() {
        manifest.record_seed(&format!("repeat.{i}"), *s);
    }
    manifest.write(&dir.join("bench_manifest.txt"))?;

    let mut runs: Vec<Vec<ComparisonRow>> = Vec::new();
    let mut best: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    for (i, &s) in repeat_seeds.iter().enumerate() {
        let bpr_cfg = LearnerConfig { seed: s, ..bpr_base };
        let warp_cfg = WarpConfig { seed: s, ..warp_base };
        let report = compare_learners(kind, &train, &validation, &bpr_cfg, &warp_cfg)?;
        for (name, outcome) in [("bpr", &report.bpr), ("warp", &report.warp)] {
            best.entry(name).or_default().push(outcome.best_recall().unwrap_or(0.0));
        }
        log::info!("repeat {} of {} done", i + 1, args.repeats);
        runs.push(report.rows());
    }

    let k = bpr_base.eval_k;
    if args.long {
        let mut w = writer(&long_path)?;
        w.write_record([
            "repeat".to_string(),
            "epoch".into(),
            "learner".into(),
            "accumulated_sampling_seconds".into(),
            "total_draws".into(),
            "steps".into(),
            format!("recall_at_{k}"),
        ])
        .map_err(cortrieve::Error::from)?;
        for (i, rows) in runs.iter().enumerate() {
            for r in rows {
                w.write_record([
                    i.to_string(),
                    r.epoch.to_string(),
                    r.learner.to_string(),
                    format!("{:.6}", r.accumulated_sampling_seconds),
                    r.total_draws.to_string(),
                    r.steps.to_string(),
                    format!("{:.6}", r.recall),
                ])
                .map_err(cortrieve::Error::from)?;
            }
        }
        w.flush().map_err(|e| cortrieve::Error::io(&long_path, e))?;
    }

    let mut cells = Cells::new();
    for r in runs.iter().flatten() {
        cells
            .entry((r.learner, r.epoch))
            .or_default()
            .push((r.accumulated_sampling_seconds, r.total_draws as f64, r.recall));
    }
    let mut w = writer(&summary_path)?;
    let mut header = vec!["epoch".to_string(), "learner".into(), "repeats".into()];
    for col in ["accumulated_sampling_seconds", "total_draws", &format!("recall_at_{k}")] {
        header.push(format!("{col}_mean"));
        header.push(format!("{col}_stdev"));
    }
    w.write_record(&header).map_err(cortrieve::Error::from)?;
    for ((learner, epoch), vals) in &cells {
        let mut record = vec![epoch.to_string(), learner.to_string(), vals.len().to_string()];
        let columns: [Vec<f64>; 3] = [
            vals.iter().map(|v| v.0).collect(),
            vals.iter().map(|v| v.1).collect(),
            vals.iter().map(|v| v.2).collect(),
        ];
        for col in &columns {
            let (m, s) = mean_stdev(col);
            record.push(format!("{m:.6}"));
            record.push(format!("{s:.6}"));
        }
        w.write_record(&record).map_err(cortrieve::Error::from)?;
    }
    w.flush().map_err(|e| cortrieve::Error::io(&summary_path, e))?;

    for (learner, values) in &best {
        let (m, s) = mean_stdev(values);
        println!("{learner} best_recall@{k}={m:.6} +- {s:.6} over {} repeats", values.len());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_sample_stdev() {
        assert_eq!(mean_stdev(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_stdev(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.2909944487358056).abs() < 1e-12);
    }
}
