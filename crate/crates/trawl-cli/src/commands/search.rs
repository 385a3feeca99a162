//! `search bm25|bm25rm3|dense`: produce TREC run files.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use trawl_core::corpus::{load_topics, Topic};
use trawl_core::dense::{read_vectors, DenseIndex, EmbeddingVector};
use trawl_core::eval::{write_run, Run};
use trawl_core::hit::ScoredHit;
use trawl_core::sparse::{search_bm25, search_bm25_rm3, InvertedIndex, Rm3Params};
use trawl_core::{par, Result};

use crate::manifest::Manifest;

#[derive(Args)]
pub struct SearchArgs {
    #[command(subcommand)]
    pub mode: SearchMode,
}

#[derive(Subcommand)]
pub enum SearchMode {
    /// BM25 retrieval over a sparse index.
    Bm25 {
        /// Sparse index directory.
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        topics: PathBuf,
        /// Hits per topic.
        #[arg(long, default_value_t = 1000)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "bm25")]
        tag: String,
    },
    /// BM25 with RM3 pseudo-relevance feedback.
    Bm25rm3 {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        topics: PathBuf,
        #[arg(long, default_value_t = 1000)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        fb_docs: usize,
        #[arg(long, default_value_t = 10)]
        fb_terms: usize,
        #[arg(long, default_value_t = 0.5)]
        orig_weight: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "bm25rm3")]
        tag: String,
    },
    /// Dense segment retrieval aggregated to document scores.
    Dense {
        /// Dense index directory.
        #[arg(long)]
        index: PathBuf,
        /// Query vector file keyed by topic id.
        #[arg(long)]
        queries: PathBuf,
        /// Segments retrieved per query before aggregation.
        #[arg(long, default_value_t = 100)]
        k: usize,
        /// Top segment scores averaged per document.
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "dense")]
        tag: String,
    },
}

pub fn search(args: SearchArgs) -> Result<()> {
    match args.mode {
        SearchMode::Bm25 {
            index,
            topics,
            k,
            out,
            tag,
        } => {
            let idx = InvertedIndex::load(&index)?;
            let topic_list = load_topics(&topics)?;
            let results: Vec<Vec<ScoredHit>> =
                par::map_ref_collect(&topic_list, |t| search_bm25(&idx, t, k));
            let run = collect_run(&topic_list, results.into_iter().map(Ok).collect(), &tag)?;
            write_run(&run, &out)?;

            let mut manifest = Manifest::new("search-bm25");
            manifest.input("index", &index)?;
            manifest.input("topics", &topics)?;
            manifest.set("param.k", k);
            manifest.set("param.tag", &tag);
            manifest.write(&manifest_path(&out))?;
            println!("wrote {} topics -> {}", run.topics.len(), out.display());
            Ok(())
        }
        SearchMode::Bm25rm3 {
            index,
            topics,
            k,
            fb_docs,
            fb_terms,
            orig_weight,
            out,
            tag,
        } => {
            let idx = InvertedIndex::load(&index)?;
            let topic_list = load_topics(&topics)?;
            let params = Rm3Params {
                fb_docs,
                fb_terms,
                orig_weight,
            };
            let results: Vec<Result<Vec<ScoredHit>>> =
                par::map_ref_collect(&topic_list, |t| search_bm25_rm3(&idx, t, k, &params));
            let run = collect_run(&topic_list, results, &tag)?;
            write_run(&run, &out)?;

            let mut manifest = Manifest::new("search-bm25rm3");
            manifest.input("index", &index)?;
            manifest.input("topics", &topics)?;
            manifest.set("param.k", k);
            manifest.set("param.fb_docs", fb_docs);
            manifest.set("param.fb_terms", fb_terms);
            manifest.set("param.orig_weight", orig_weight);
            manifest.set("param.tag", &tag);
            manifest.write(&manifest_path(&out))?;
            println!("wrote {} topics -> {}", run.topics.len(), out.display());
            Ok(())
        }
        SearchMode::Dense {
            index,
            queries,
            k,
            m,
            out,
            tag,
        } => {
            let idx = DenseIndex::load(&index)?;
            let mut query_vectors = read_vectors(&queries)?;
            query_vectors.sort_by(|a, b| a.id.cmp(&b.id));
            for pair in query_vectors.windows(2) {
                if pair[0].id == pair[1].id {
                    return Err(trawl_core::Error::DuplicateVectorId {
                        id: pair[0].id.clone(),
                    });
                }
            }
            let results: Vec<Result<Vec<ScoredHit>>> =
                par::map_ref_collect(&query_vectors, |q: &EmbeddingVector| {
                    let segments = idx.search(q, k)?;
                    idx.aggregate(&segments, m)
                });
            let mut run = Run::new(tag.clone());
            for (query, hits) in query_vectors.iter().zip(results) {
                run.insert_hits(query.id.clone(), hits?);
            }
            write_run(&run, &out)?;

            let mut manifest = Manifest::new("search-dense");
            manifest.input("index", &index)?;
            manifest.input("queries", &queries)?;
            manifest.set("param.k", k);
            manifest.set("param.m", m);
            manifest.set("param.tag", &tag);
            manifest.write(&manifest_path(&out))?;
            println!("wrote {} topics -> {}", run.topics.len(), out.display());
            Ok(())
        }
    }
}

fn collect_run(
    topics: &[Topic],
    results: Vec<Result<Vec<ScoredHit>>>,
    tag: &str,
) -> Result<Run> {
    let mut run = Run::new(tag);
    for (topic, hits) in topics.iter().zip(results) {
        run.insert_hits(topic.id.clone(), hits?);
    }
    Ok(run)
}

fn manifest_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.txt");
    PathBuf::from(name)
}
