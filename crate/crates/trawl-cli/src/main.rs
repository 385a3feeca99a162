//! `trawl`: hybrid sparse+dense retrieval pipeline.
//!
//! Subcommands cover every pipeline stage: corpus indexing, embedding,
//! retrieval, fusion with cross-validated interpolation, trec_eval-style
//! evaluation, significance testing, weak-supervision synthesis, and the
//! whole chain end to end (`pipeline`). Every run that writes output also
//! writes a manifest (config echo, input digests, versions, seed), and
//! identical config + inputs produce byte-identical outputs.
//!
//! Exit codes: 0 success, 2 missing input (and clap usage errors),
//! 3 malformed input file, 4 violated invariant or configuration.

mod commands;
mod config;
mod manifest;
mod report;

use clap::{Parser, Subcommand};
use trawl_core::ErrorCategory;

#[derive(Parser)]
#[command(
    name = "trawl",
    version,
    about = "Hybrid sparse+dense document retrieval and evaluation pipeline"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the inverted index over a corpus file.
    IndexSparse(commands::index::IndexSparseArgs),
    /// Build the dense segment index from a vector file.
    IndexDense(commands::index::IndexDenseArgs),
    /// Embed corpus segments or topics with the hashing encoder.
    Embed(commands::embed::EmbedArgs),
    /// Retrieve a TREC run (bm25, bm25rm3, or dense).
    Search(commands::search::SearchArgs),
    /// Fuse a sparse and a dense run at a fixed alpha.
    Fuse(commands::fuse::FuseArgs),
    /// Cross-validate alpha over a grid and report per-fold selections.
    SweepAlpha(commands::fuse::SweepAlphaArgs),
    /// Compute AP / P@20 / nDCG@20 for a run against qrels.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Paired randomization significance test between two runs.
    Sigtest(commands::evaluate::SigtestArgs),
    /// Synthesize weakly-supervised training examples from article titles.
    Synthesize(commands::synthesize::SynthesizeArgs),
    /// Run the full pipeline from a config file.
    Pipeline(commands::pipeline::PipelineArgs),
}

fn main() {
    let cli = Cli::parse();
    trawl_core::par::configure_threads(cli.threads);

    let result = match cli.command {
        Command::IndexSparse(args) => commands::index::index_sparse(args),
        Command::IndexDense(args) => commands::index::index_dense(args),
        Command::Embed(args) => commands::embed::embed(args),
        Command::Search(args) => commands::search::search(args),
        Command::Fuse(args) => commands::fuse::fuse_runs(args),
        Command::SweepAlpha(args) => commands::fuse::sweep_alpha(args),
        Command::Evaluate(args) => commands::evaluate::evaluate(args),
        Command::Sigtest(args) => commands::evaluate::sigtest(args),
        Command::Synthesize(args) => commands::synthesize::synthesize(args),
        Command::Pipeline(args) => commands::pipeline::pipeline(args),
    };

    if let Err(err) = result {
        let category = err.category();
        eprintln!("error: category={} message={err}", category.as_str());
        std::process::exit(match category {
            ErrorCategory::MissingInput => 2,
            ErrorCategory::Format => 3,
            ErrorCategory::Invariant => 4,
        });
    }
}
