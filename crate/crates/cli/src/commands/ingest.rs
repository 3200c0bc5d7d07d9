use std::fs;

use cortrieve::snapshot::save_corpus;
use cortrieve::{ingest_lastfm, ingest_tsv, ingest_yelp, TripleSchema};

use crate::args::{Format, IngestArgs};
use crate::error::{CliError, CliResult};

pub fn run(args: IngestArgs) -> CliResult {
    let corpus = match args.format {
        Format::Tsv => {
            let schema: TripleSchema = args.schema.parse().map_err(|e: cortrieve::Error| CliError::usage(e.to_string()))?;
            ingest_tsv(&args.input, schema)?
        }
        Format::Lastfm => {
            let listens = args
                .listens
                .as_deref()
                .ok_or_else(|| CliError::usage("--format lastfm needs --listens"))?;
            ingest_lastfm(&args.input, listens, args.top_tags)?
        }
        Format::Yelp => {
            let categories = args
                .categories
                .as_deref()
                .ok_or_else(|| CliError::usage("--format yelp needs --categories"))?;
            ingest_yelp(&args.input, categories, args.min_reviews)?
        }
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| cortrieve::Error::io(dir, e))?;
    }
    save_corpus(&corpus, &args.out)?;
    let stats = format!("{}\n", corpus.stats());
    let mut stats_path = args.out.clone().into_os_string();
    stats_path.push(".stats");
    fs::write(&stats_path, &stats).map_err(|e| cortrieve::Error::io(&stats_path, e))?;
    print!("{stats}");
    Ok(())
}
