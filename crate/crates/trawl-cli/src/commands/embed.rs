//! `embed`: hashing-encoder embeddings for corpus segments or topics.
//!
//! External neural encoders replace this stage by writing the same vector
//! file format; everything downstream is agnostic to where vectors came
//! from.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use trawl_core::corpus::{
    load_topics, read_corpus, segment_document, LoadOptions, MalformedPolicy, Segment,
};
use trawl_core::dense::{
    write_vectors_binary, write_vectors_text, EmbeddingProvider, EmbeddingVector, HashingEncoder,
    VectorFileFormat,
};
use trawl_core::{par, Error, Result};

use crate::commands::{parse_format, parse_malformed, report_skipped};
use crate::manifest::Manifest;

#[derive(Args)]
pub struct EmbedArgs {
    /// Corpus to segment and embed (passage mode).
    #[arg(long, conflicts_with = "topics")]
    pub corpus: Option<PathBuf>,
    /// Topics to embed (query mode).
    #[arg(long)]
    pub topics: Option<PathBuf>,
    /// Output vector file.
    #[arg(long)]
    pub out: PathBuf,
    /// Vector file format: binary or text.
    #[arg(long, default_value = "binary", value_parser = parse_format)]
    pub format: VectorFileFormat,
    /// Hashing-encoder dimension.
    #[arg(long, default_value_t = HashingEncoder::DEFAULT_DIM)]
    pub dim: usize,
    /// Sentences per segment window.
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Window stride in sentences.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Language tag for query tokenization (passages use per-doc tags).
    #[arg(long, default_value = "")]
    pub language: String,
    /// Where to write the segment parent map (default `<out>.parents.tsv`).
    #[arg(long)]
    pub parents_out: Option<PathBuf>,
    #[arg(long, default_value = "abort", value_parser = parse_malformed)]
    pub on_malformed: MalformedPolicy,
}

pub fn embed(args: EmbedArgs) -> Result<()> {
    match (&args.corpus, &args.topics) {
        (Some(corpus), None) => embed_corpus(&args, corpus.clone()),
        (None, Some(topics)) => embed_topics(&args, topics.clone()),
        _ => Err(Error::InvalidConfig(
            "embed needs exactly one of --corpus or --topics".to_string(),
        )),
    }
}

fn embed_corpus(args: &EmbedArgs, corpus: PathBuf) -> Result<()> {
    let load = read_corpus(
        &corpus,
        LoadOptions {
            on_malformed: args.on_malformed,
        },
    )?;
    report_skipped(&corpus, &load.skipped);
    let encoder = HashingEncoder::new(args.dim, args.language.clone());

    // Per-document segmentation and embedding are independent; merge back
    // in document order.
    let per_doc: Vec<Result<Vec<(Segment, EmbeddingVector)>>> =
        par::map_ref_collect(&load.documents, |doc| {
            let segments = segment_document(doc, args.window, args.stride)?;
            segments
                .into_iter()
                .map(|seg| {
                    let vector = encoder.embed_passage(&seg)?;
                    Ok((seg, vector))
                })
                .collect()
        });

    let mut vectors = Vec::new();
    let mut parents: Vec<(String, String)> = Vec::new();
    for result in per_doc {
        for (segment, vector) in result? {
            parents.push((segment.segment_id, segment.parent_doc_id));
            vectors.push(vector);
        }
    }

    write_vector_file(&args.out, &vectors, args.format)?;
    let parents_path = args
        .parents_out
        .clone()
        .unwrap_or_else(|| default_parents_path(&args.out));
    write_parents_tsv(&parents_path, &parents)?;

    let mut manifest = Manifest::new("embed");
    manifest.input("corpus", &corpus)?;
    manifest.set("param.dim", args.dim);
    manifest.set("param.window", args.window);
    manifest.set("param.stride", args.stride);
    manifest.set("output.segments", vectors.len());
    manifest.write(&manifest_path(&args.out))?;

    println!(
        "embedded {} segments from {} documents -> {}",
        vectors.len(),
        load.documents.len(),
        args.out.display()
    );
    Ok(())
}

fn embed_topics(args: &EmbedArgs, topics_path: PathBuf) -> Result<()> {
    let topics = load_topics(&topics_path)?;
    let encoder = HashingEncoder::new(args.dim, args.language.clone());
    let vectors: Vec<EmbeddingVector> = topics
        .iter()
        .map(|t| encoder.embed_query(t))
        .collect::<Result<_>>()?;
    write_vector_file(&args.out, &vectors, args.format)?;

    let mut manifest = Manifest::new("embed");
    manifest.input("topics", &topics_path)?;
    manifest.set("param.dim", args.dim);
    manifest.set("output.queries", vectors.len());
    manifest.write(&manifest_path(&args.out))?;

    println!(
        "embedded {} topics -> {}",
        vectors.len(),
        args.out.display()
    );
    Ok(())
}

pub fn write_vector_file(
    path: &std::path::Path,
    vectors: &[EmbeddingVector],
    format: VectorFileFormat,
) -> Result<()> {
    match format {
        VectorFileFormat::Binary => write_vectors_binary(path, vectors),
        VectorFileFormat::Text => write_vectors_text(path, vectors),
    }
}

pub fn default_parents_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".parents.tsv");
    PathBuf::from(name)
}

fn manifest_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.txt");
    PathBuf::from(name)
}

pub fn write_parents_tsv(path: &std::path::Path, parents: &[(String, String)]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut w = std::io::BufWriter::new(file);
    for (segment, doc) in parents {
        writeln!(w, "{segment}\t{doc}").map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    w.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
