use cortrieve::snapshot::{load_corpus, save_corpus};
use cortrieve::{seed, split, SplitSpec};

use crate::args::SplitArgs;
use crate::commands::out_dir;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub fn run(args: SplitArgs) -> CliResult {
    let [train, validation, test] = args.fractions[..] else {
        return Err(CliError::usage(format!(
            "--fractions takes three values, got {}",
            args.fractions.len()
        )));
    };
    let spec = SplitSpec::new(train, validation, test, args.seed)?;
    let dir = out_dir(args.out_dir)?;
    let corpus = load_corpus(&args.corpus)?;

    let mut manifest = RunManifest::new("split");
    manifest.set("fractions", format!("{train},{validation},{test}"));
    manifest.set("seed", args.seed);
    manifest.record_input("corpus", &args.corpus)?;
    let (train_part, validation_part, test_part) = split(&corpus, &spec)?;
    for (name, part) in [("train", &train_part), ("validation", &validation_part), ("test", &test_part)] {
        let path = dir.join(format!("{name}.bin"));
        save_corpus(part, &path)?;
        manifest.record_output(name, &path);
        println!("{name}={}", part.len());
    }

    let sub_seed = seed::derive(args.seed, "subsample");
    if !args.train_frac.is_empty() {
        manifest.record_seed("subsample", sub_seed);
    }
    for &fraction in &args.train_frac {
        let sub = train_part.subsample(fraction, sub_seed)?;
        let name = format!("train_frac_{fraction}");
        let path = dir.join(format!("{name}.bin"));
        save_corpus(&sub, &path)?;
        manifest.record_output(&name, &path);
        println!("{name}={}", sub.len());
    }
    manifest.write(&dir.join("split_manifest.txt"))?;
    Ok(())
}
