//! Weakly-supervised training-data synthesis.
//!
//! Article titles become queries and the articles themselves the positive
//! documents. Each title runs as a BM25 query over the article collection;
//! an article whose own document does not land in the top k is dropped
//! (its title evidently does not retrieve it, so it would make a useless
//! positive), and the other retrieved documents supply the negatives.
//! The recorded `positive_rank` plus deterministic retrieval preserve the
//! full candidate set implicitly even though the export samples a small
//! negative list per example.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_whitespace, tokenize, Document};
use crate::error::{open_buffered, Error, Result};
use crate::par;
use crate::rng::SplitMix64;
use crate::sparse::{InvertedIndex, WeightedQuery};

/// Title suffixes stripped before a title becomes a query.
const DISAMBIGUATION_SUFFIXES: [&str; 1] = ["(disambiguation)"];

/// One synthesized (query, positive, negatives) record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub query: String,
    pub positive: ExampleDoc,
    pub negatives: Vec<ExampleDoc>,
    /// 1-based rank of the positive in the BM25 top-k for `query`.
    pub positive_rank: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleDoc {
    pub id: String,
    pub title: String,
    pub text: String,
}

impl ExampleDoc {
    fn from_document(doc: &Document) -> Self {
        Self {
            id: doc.id.clone(),
            title: doc.title.clone(),
            text: doc.text.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeSampling {
    /// The top-ranked non-positive retrieved documents (the default).
    #[default]
    Top,
    /// A seeded uniform sample from the retrieved non-positive documents.
    RandomFromRetrieved,
}

impl NegativeSampling {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "top" => Some(Self::Top),
            "random-from-retrieved" | "random" => Some(Self::RandomFromRetrieved),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisConfig {
    /// Retrieval depth for the positive-in-top-k filter.
    pub k: usize,
    /// Negatives exported per example; must be <= k - 1.
    pub negatives_per_example: usize,
    pub negative_sampling: NegativeSampling,
    pub seed: u64,
    /// Articles whose title has fewer tokens are filtered out.
    pub min_title_tokens: usize,
    /// Articles whose body has fewer tokens are filtered out; stubs and
    /// redirects poison training data.
    pub min_body_tokens: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            k: 1000,
            negatives_per_example: 7,
            negative_sampling: NegativeSampling::Top,
            seed: 0,
            min_title_tokens: 1,
            min_body_tokens: 20,
        }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if self.negatives_per_example > self.k.saturating_sub(1) {
            return Err(Error::InvalidConfig(format!(
                "negatives_per_example ({}) must be <= k - 1 ({})",
                self.negatives_per_example,
                self.k - 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisStats {
    pub total_articles: usize,
    pub emitted: usize,
    /// Positive document absent from its own query's top k.
    pub dropped_unretrieved: usize,
    /// Failed the title/body length filters.
    pub filtered_short: usize,
}

enum Outcome {
    Emitted(Box<TrainingExample>),
    Filtered,
    Dropped,
}

/// Synthesize training examples from `articles` against an index built over
/// the same article set. Output order follows article input order, so runs
/// with the same seed are byte-identical downstream.
pub fn synthesize(
    articles: &[Document],
    index: &InvertedIndex,
    config: &SynthesisConfig,
) -> Result<(Vec<TrainingExample>, SynthesisStats)> {
    config.validate()?;
    let by_id: HashMap<&str, &Document> =
        articles.iter().map(|d| (d.id.as_str(), d)).collect();

    let outcomes: Vec<Result<Outcome>> = par::map_range(articles.len(), |i| {
        synthesize_one(&articles[i], i as u64, index, &by_id, config)
    });

    let mut stats = SynthesisStats {
        total_articles: articles.len(),
        ..Default::default()
    };
    let mut examples = Vec::new();
    for outcome in outcomes {
        match outcome? {
            Outcome::Emitted(example) => {
                stats.emitted += 1;
                examples.push(*example);
            }
            Outcome::Filtered => stats.filtered_short += 1,
            Outcome::Dropped => stats.dropped_unretrieved += 1,
        }
    }
    Ok((examples, stats))
}

fn synthesize_one(
    article: &Document,
    ordinal: u64,
    index: &InvertedIndex,
    by_id: &HashMap<&str, &Document>,
    config: &SynthesisConfig,
) -> Result<Outcome> {
    if index.ordinal(&article.id).is_none() {
        return Err(Error::UnknownDocId {
            doc_id: article.id.clone(),
        });
    }

    let query = clean_title(&article.title);
    let query_tokens = tokenize(&query, &article.language);
    if query_tokens.len() < config.min_title_tokens.max(1) {
        return Ok(Outcome::Filtered);
    }
    if tokenize(&article.text, &article.language).len() < config.min_body_tokens {
        return Ok(Outcome::Filtered);
    }

    let hits = index.search(&WeightedQuery::plain(&query_tokens), config.k);
    let Some(positive_rank) = hits.iter().find(|h| h.doc_id == article.id).map(|h| h.rank)
    else {
        return Ok(Outcome::Dropped);
    };

    let candidates: Vec<&str> = hits
        .iter()
        .filter(|h| h.doc_id != article.id)
        .map(|h| h.doc_id.as_str())
        .collect();
    let chosen: Vec<&str> = match config.negative_sampling {
        NegativeSampling::Top => candidates
            .iter()
            .take(config.negatives_per_example)
            .copied()
            .collect(),
        NegativeSampling::RandomFromRetrieved => {
            let mut rng = SplitMix64::substream(config.seed, ordinal);
            rng.sample_indices(candidates.len(), config.negatives_per_example)
                .into_iter()
                .map(|i| candidates[i])
                .collect()
        }
    };
    let negatives: Vec<ExampleDoc> = chosen
        .into_iter()
        .map(|id| {
            by_id
                .get(id)
                .map(|d| ExampleDoc::from_document(d))
                .ok_or_else(|| Error::UnknownDocId {
                    doc_id: id.to_string(),
                })
        })
        .collect::<Result<_>>()?;

    Ok(Outcome::Emitted(Box::new(TrainingExample {
        query,
        positive: ExampleDoc::from_document(article),
        negatives,
        positive_rank,
    })))
}

/// Whitespace-normalize a title and strip disambiguation suffixes.
fn clean_title(title: &str) -> String {
    let mut title = normalize_whitespace(title);
    for suffix in DISAMBIGUATION_SUFFIXES {
        let lower = title.to_lowercase();
        if let Some(stripped_len) = lower.strip_suffix(suffix).map(str::len) {
            title.truncate(stripped_len);
            title = title.trim_end().to_string();
        }
    }
    title
}

/// Write examples as line-delimited records; returns the count written.
pub fn export_training_file(examples: &[TrainingExample], path: &Path) -> Result<usize> {
    let file = std::fs::File::create(path).map_err(|e| crate::error::io_err(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for example in examples {
        serde_json::to_writer(&mut w, example)
            .map_err(|e| crate::error::io_err(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| crate::error::io_err(path, e))?;
    }
    w.flush().map_err(|e| crate::error::io_err(path, e))?;
    Ok(examples.len())
}

pub fn parse_training_file(path: &Path) -> Result<Vec<TrainingExample>> {
    let reader = open_buffered(path)?;
    let mut examples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| crate::error::io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let example: TrainingExample = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: i as u64 + 1,
            message: format!("malformed training example: {e}"),
        })?;
        examples.push(example);
    }
    Ok(examples)
}
