//! `index-sparse` and `index-dense`.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use clap::Args;

use trawl_core::corpus::{read_corpus, Analyzer, FieldPolicy, LoadOptions, MalformedPolicy};
use trawl_core::dense::{build_dense_index, read_vectors};
use trawl_core::sparse::build_index;
use trawl_core::{Error, Result};

use crate::commands::{parse_fields, parse_malformed, report_skipped};
use crate::manifest::Manifest;

#[derive(Args)]
pub struct IndexSparseArgs {
    /// Corpus file (line-delimited records: id, title, text, language).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output index directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Which fields to index: title-and-text or text.
    #[arg(long, default_value = "title-and-text", value_parser = parse_fields)]
    pub fields: FieldPolicy,
    /// Malformed-record policy: abort or skip.
    #[arg(long, default_value = "abort", value_parser = parse_malformed)]
    pub on_malformed: MalformedPolicy,
}

pub fn index_sparse(args: IndexSparseArgs) -> Result<()> {
    let load = read_corpus(
        &args.corpus,
        LoadOptions {
            on_malformed: args.on_malformed,
        },
    )?;
    report_skipped(&args.corpus, &load.skipped);

    let index = build_index(&load.documents, Analyzer::new(args.fields))?;
    index.save(&args.out)?;

    let mut manifest = Manifest::new("index-sparse");
    manifest.input("corpus", &args.corpus)?;
    manifest.set("param.fields", args.fields.as_str());
    manifest.set("output.documents", index.num_docs());
    manifest.set("output.terms", index.vocabulary_size());
    manifest.write(&args.out.join("manifest.txt"))?;

    println!(
        "indexed {} documents ({} terms, avgdl {:.2}) -> {}",
        index.num_docs(),
        index.vocabulary_size(),
        index.avgdl(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
pub struct IndexDenseArgs {
    /// Vector file (binary or text; format sniffed).
    #[arg(long)]
    pub vectors: PathBuf,
    /// Output index directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Parent map TSV (`segment_id<TAB>doc_id`). Defaults to deriving the
    /// doc id from the `doc#ordinal` segment-id convention.
    #[arg(long)]
    pub parents: Option<PathBuf>,
}

pub fn index_dense(args: IndexDenseArgs) -> Result<()> {
    let vectors = read_vectors(&args.vectors)?;
    let parent_map = match &args.parents {
        Some(path) => read_parents_tsv(path)?,
        None => vectors
            .iter()
            .map(|v| {
                let doc = v.id.rsplit_once('#').map(|(doc, _)| doc).ok_or_else(|| {
                    Error::UnknownSegment {
                        segment_id: v.id.clone(),
                    }
                })?;
                Ok((v.id.clone(), doc.to_string()))
            })
            .collect::<Result<HashMap<String, String>>>()?,
    };

    let index = build_dense_index(&vectors, &parent_map)?;
    index.save(&args.out)?;

    let mut manifest = Manifest::new("index-dense");
    manifest.input("vectors", &args.vectors)?;
    if let Some(parents) = &args.parents {
        manifest.input("parents", parents)?;
    }
    manifest.set("output.segments", index.len());
    manifest.set("output.dimension", index.dimension());
    manifest.write(&args.out.join("manifest.txt"))?;

    println!(
        "indexed {} segment vectors (d={}) -> {}",
        index.len(),
        index.dimension(),
        args.out.display()
    );
    Ok(())
}

pub fn read_parents_tsv(path: &Path) -> Result<HashMap<String, String>> {
    if !path.exists() {
        return Err(Error::MissingInput {
            path: path.to_path_buf(),
        });
    }
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut map = HashMap::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let (segment, doc) = line.split_once('\t').ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            line: i as u64 + 1,
            message: "expected segment_id<TAB>doc_id".to_string(),
        })?;
        map.insert(segment.to_string(), doc.to_string());
    }
    Ok(map)
}
