use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cortrieve::ModelKind;

#[derive(Parser, Debug)]
#[command(name = "cortrieve", version, about = "Collaborative retrieval with latent-factor models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a corpus snapshot from raw logs.
    Ingest(IngestArgs),
    /// Split a corpus into train, validation and test parts.
    Split(SplitArgs),
    /// Train a model and write its bank, history and manifest.
    Train(TrainArgs),
    /// Report recall@k of a bank on a test corpus.
    Eval(EvalArgs),
    /// Compare BPR and WARP on the same data over repeated seeds.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Lastfm,
    Yelp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Learner {
    Bpr,
    Warp,
}

impl Learner {
    pub fn name(self) -> &'static str {
        match self {
            Learner::Bpr => "bpr",
            Learner::Warp => "warp",
        }
    }
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long, value_enum)]
    pub format: Format,
    /// Triple log (tsv), tag assignments (lastfm) or reviews (yelp).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Listening log, lastfm only.
    #[arg(long)]
    pub listens: Option<PathBuf>,
    /// Business categories, yelp only.
    #[arg(long)]
    pub categories: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub top_tags: usize,
    #[arg(long, default_value_t = 4)]
    pub min_reviews: usize,
    /// Column order of a tsv log.
    #[arg(long, default_value = "query,user,item")]
    pub schema: String,
    /// Snapshot path; `.tsv` or `.txt` writes text, anything else binary.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', default_value = "0.8,0.1,0.1")]
    pub fractions: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write nested subsamples of the train part at these fractions.
    #[arg(long, value_delimiter = ',')]
    pub train_frac: Vec<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Hyperparameters shared by `train` and `bench`; unset flags fall back to
/// the config file, then to defaults.
#[derive(Args, Debug, Default)]
pub struct HyperArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Embedding dimension (NMF rank).
    #[arg(long)]
    pub n: Option<usize>,
    /// WARP norm radius.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub eval_k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `sweep` or `uniform`.
    #[arg(long)]
    pub positive_sampling: Option<String>,
    #[arg(long)]
    pub max_sampling_attempts: Option<usize>,
    /// Flat key=value file; a run manifest works here too.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// `lcr`, `ilcr`, `pitf` or `nmf`.
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long, value_enum)]
    pub learner: Option<Learner>,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Write the per-step WARP trace.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub bank: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30")]
    pub k: Vec<usize>,
    /// Drop these corpora's positives from each candidate list.
    #[arg(long)]
    pub exclude: Vec<PathBuf>,
    /// CSV path; defaults to recall.csv in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// `lcr`, `ilcr`, `pitf` or `nmf`.
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// WARP learning rate; `--alpha` applies to BPR.
    #[arg(long)]
    pub warp_alpha: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Also write every repeat's rows.
    #[arg(long)]
    pub long: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
