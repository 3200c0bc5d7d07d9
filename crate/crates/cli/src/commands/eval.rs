use std::fs;

use cortrieve::eval::recall_at_k_with;
use cortrieve::snapshot::{load_corpus, load_model};
use cortrieve::{EvalOptions, Scorer};

use crate::args::EvalArgs;
use crate::commands::{out_dir, shape};
use crate::error::{CliError, CliResult};

pub fn run(args: EvalArgs) -> CliResult {
    if args.k.is_empty() || args.k.contains(&0) {
        return Err(CliError::usage("--k values must be positive"));
    }
    let model = load_model(&args.bank)?;
    let test = load_corpus(&args.test)?;
    let dims = model.dims();
    if (dims.n_queries, dims.n_users, dims.n_items) != (test.n_queries(), test.n_users(), test.n_items()) {
        return Err(cortrieve::Error::ShapeMismatch {
            left: format!(
                "bank {} {}x{}x{}",
                args.bank.display(),
                dims.n_queries,
                dims.n_users,
                dims.n_items
            ),
            right: format!("test {} {}", args.test.display(), shape(&test)),
        }
        .into());
    }

    let mut excluded = Vec::new();
    for path in &args.exclude {
        let c = load_corpus(path)?;
        if !c.same_shape(&test) {
            return Err(cortrieve::Error::ShapeMismatch {
                left: format!("exclude {} {}", path.display(), shape(&c)),
                right: format!("test {} {}", args.test.display(), shape(&test)),
            }
            .into());
        }
        excluded.extend_from_slice(c.interactions());
    }
    let exclude = (!args.exclude.is_empty()).then(|| test.with_interactions(excluded));
    let opts = EvalOptions {
        exclude: exclude.as_ref(),
        keep_ranks: false,
    };
    let report = recall_at_k_with(&model, &test, &args.k, &opts)?;

    let path = match args.out {
        Some(p) => p,
        None => out_dir(None)?.join("recall.csv"),
    };
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    fs::write(&path, &csv).map_err(|e| cortrieve::Error::io(&path, e))?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
