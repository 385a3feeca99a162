//! `synthesize`: weakly-supervised training data from article titles.

use std::path::PathBuf;

use clap::Args;

use trawl_core::corpus::{read_corpus, Analyzer, FieldPolicy, LoadOptions, MalformedPolicy};
use trawl_core::sparse::build_index;
use trawl_core::weaksup::{export_training_file, NegativeSampling, SynthesisConfig};
use trawl_core::Result;

use crate::commands::{parse_fields, parse_malformed, parse_sampling, report_skipped};
use crate::manifest::Manifest;

#[derive(Args)]
pub struct SynthesizeArgs {
    /// Pre-extracted articles in the corpus line format.
    #[arg(long)]
    pub articles: PathBuf,
    /// Output training-example file (line-delimited records).
    #[arg(long)]
    pub out: PathBuf,
    /// Retrieval depth for the positive-in-top-k filter.
    #[arg(long, default_value_t = 1000)]
    pub k: usize,
    /// Negatives exported per example.
    #[arg(long, default_value_t = 7)]
    pub negatives: usize,
    /// Negative sampling: top or random-from-retrieved.
    #[arg(long, default_value = "top", value_parser = parse_sampling)]
    pub sampling: NegativeSampling,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub min_title_tokens: usize,
    #[arg(long, default_value_t = 20)]
    pub min_body_tokens: usize,
    /// Which article fields to index for the retrieval filter.
    #[arg(long, default_value = "title-and-text", value_parser = parse_fields)]
    pub fields: FieldPolicy,
    #[arg(long, default_value = "abort", value_parser = parse_malformed)]
    pub on_malformed: MalformedPolicy,
}

pub fn synthesize(args: SynthesizeArgs) -> Result<()> {
    let load = read_corpus(
        &args.articles,
        LoadOptions {
            on_malformed: args.on_malformed,
        },
    )?;
    report_skipped(&args.articles, &load.skipped);

    let index = build_index(&load.documents, Analyzer::new(args.fields))?;
    let config = SynthesisConfig {
        k: args.k,
        negatives_per_example: args.negatives,
        negative_sampling: args.sampling,
        seed: args.seed,
        min_title_tokens: args.min_title_tokens,
        min_body_tokens: args.min_body_tokens,
    };
    let (examples, stats) = trawl_core::weaksup::synthesize(&load.documents, &index, &config)?;
    let count = export_training_file(&examples, &args.out)?;

    let mut manifest = Manifest::new("synthesize");
    manifest.input("articles", &args.articles)?;
    manifest.set("param.k", args.k);
    manifest.set("param.negatives", args.negatives);
    manifest.set("param.seed", args.seed);
    manifest.set("param.min_title_tokens", args.min_title_tokens);
    manifest.set("param.min_body_tokens", args.min_body_tokens);
    manifest.set("output.examples", stats.emitted);
    manifest.set("output.dropped_unretrieved", stats.dropped_unretrieved);
    manifest.set("output.filtered_short", stats.filtered_short);
    manifest.write(&manifest_path(&args.out))?;

    println!(
        "synthesized {count} examples from {} articles ({} dropped, {} filtered) -> {}",
        stats.total_articles,
        stats.dropped_unretrieved,
        stats.filtered_short,
        args.out.display()
    );
    Ok(())
}

fn manifest_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.txt");
    PathBuf::from(name)
}
