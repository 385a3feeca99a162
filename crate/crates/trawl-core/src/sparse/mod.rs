//! Inverted index with BM25 ranking and RM3 pseudo-relevance feedback.
//!
//! The scoring function follows the Lucene/Anserini default variant:
//!
//! ```text
//! score(q, d) = |q|_eff · Σ_t  w(t) · idf(t) · tf / (tf + k1·(1 − b + b·dl/avgdl))
//! idf(t)     = ln(1 + (N − df + 0.5) / (df + 0.5))
//! ```
//!
//! with `k1 = 0.9`, `b = 0.4` and no query-side saturation. Queries are
//! weighted term distributions: a plain query holds `w(t) = qtf/|q|` with
//! `|q|_eff = |q|`, which reduces the sum to ordinary multi-occurrence BM25;
//! RM3-expanded queries hold the interpolated relevance model with
//! `|q|_eff = 1`, so expansion rescales scores uniformly without disturbing
//! plain-query semantics.

mod rm3;
mod storage;

pub use rm3::{relevance_model, rm3_expand, Rm3Params};

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{tokenize, Analyzer, Document, Topic};
use crate::error::{Error, Result};
use crate::hit::{rank_hits_top_k, ScoredHit};
use crate::par;

/// Term-frequency saturation (Anserini default).
pub const BM25_K1: f64 = 0.9;
/// Length normalization (Anserini default).
pub const BM25_B: f64 = 0.4;

/// The per-term saturation factor `tf / (tf + k1·(1 − b + b·dl/avgdl))`,
/// bounded by 1.
pub fn bm25_saturation(tf: f64, dl: f64, avgdl: f64) -> f64 {
    tf / (tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / avgdl))
}

/// One postings entry: document ordinal and term frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// A query as a weighted term distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuery {
    /// term -> nonnegative weight. Plain queries: `qtf / |q|`.
    pub weights: BTreeMap<String, f64>,
    /// Multi-occurrence scale: `|q|` for plain queries, 1.0 for expanded
    /// distributions.
    pub effective_len: f64,
}

impl WeightedQuery {
    /// Uniform per-occurrence weights over a token list.
    pub fn plain(tokens: &[String]) -> Self {
        let mut weights = BTreeMap::new();
        let n = tokens.len() as f64;
        for token in tokens {
            *weights.entry(token.clone()).or_insert(0.0) += 1.0 / n;
        }
        Self {
            weights,
            effective_len: tokens.len() as f64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Immutable inverted index over a document collection.
///
/// Postings lists are sorted by document ordinal, strictly increasing.
/// After [`build_index`] the structure never mutates, so concurrent readers
/// need no coordination.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<Posting>>,
    doc_ids: Vec<String>,
    doc_lengths: Vec<u32>,
    avgdl: f64,
    analyzer: Analyzer,
    /// Language tag used to analyze queries; taken from the corpus at build.
    language: String,
    ordinals: HashMap<String, u32>,
}

/// Build an inverted index over `docs`. Documents are tokenized in parallel
/// (order-stable), postings are assembled in input order so the result is
/// identical whatever the thread count.
pub fn build_index(docs: &[Document], analyzer: Analyzer) -> Result<InvertedIndex> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut ordinals = HashMap::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        if ordinals.insert(doc.id.clone(), i as u32).is_some() {
            return Err(Error::DuplicateDocId {
                doc_id: doc.id.clone(),
            });
        }
    }

    let token_lists: Vec<Vec<String>> = par::map_ref_collect(docs, |doc| analyzer.index_tokens(doc));

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(docs.len());
    for (ord, tokens) in token_lists.into_iter().enumerate() {
        doc_lengths.push(tokens.len() as u32);
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokens {
            *tf.entry(token).or_insert(0) += 1;
        }
        for (term, count) in tf {
            postings.entry(term).or_default().push(Posting {
                doc: ord as u32,
                tf: count,
            });
        }
    }

    let total: u64 = doc_lengths.iter().map(|&l| l as u64).sum();
    let avgdl = total as f64 / docs.len() as f64;
    let language = docs
        .iter()
        .find(|d| !d.language.is_empty())
        .map(|d| d.language.clone())
        .unwrap_or_default();

    Ok(InvertedIndex {
        postings,
        doc_ids: docs.iter().map(|d| d.id.clone()).collect(),
        doc_lengths,
        avgdl,
        analyzer,
        language,
        ordinals,
    })
}

impl InvertedIndex {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn analyzer(&self) -> Analyzer {
        self.analyzer
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn doc_id(&self, ordinal: u32) -> &str {
        &self.doc_ids[ordinal as usize]
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.ordinals.get(doc_id).copied()
    }

    pub fn doc_length(&self, ordinal: u32) -> u32 {
        self.doc_lengths[ordinal as usize]
    }

    /// Document frequency of a term (0 when unseen).
    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, |p| p.len())
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    /// Iterate the vocabulary in sorted term order.
    pub(crate) fn postings_iter(&self) -> impl Iterator<Item = (&String, &[Posting])> {
        self.postings.iter().map(|(t, p)| (t, p.as_slice()))
    }

    /// `ln(1 + (N − df + 0.5)/(df + 0.5))`; strictly positive for any term
    /// that occurs in the collection.
    pub fn idf(&self, term: &str) -> f64 {
        let df = self.df(term);
        if df == 0 {
            return 0.0;
        }
        let n = self.num_docs() as f64;
        let df = df as f64;
        ((n - df + 0.5) / (df + 0.5)).ln_1p()
    }

    fn saturation(&self, tf: u32, doc_length: u32) -> f64 {
        bm25_saturation(tf as f64, doc_length as f64, self.avgdl)
    }

    /// BM25 score of one document for a weighted query. Terms absent from
    /// the index or from the document contribute 0.
    pub fn bm25_score(&self, query: &WeightedQuery, doc_ordinal: u32) -> f64 {
        let mut score = 0.0;
        for (term, &weight) in &query.weights {
            if weight <= 0.0 {
                continue;
            }
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            if let Ok(pos) = postings.binary_search_by_key(&doc_ordinal, |p| p.doc) {
                score += weight * self.idf(term) * self.saturation(postings[pos].tf, self.doc_length(doc_ordinal));
            }
        }
        score * query.effective_len
    }

    /// Rank all documents sharing at least one term with the query, keeping
    /// the top `k`. Ties break by ascending doc id.
    pub fn search(&self, query: &WeightedQuery, k: usize) -> Vec<ScoredHit> {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for (term, &weight) in &query.weights {
            if weight <= 0.0 {
                continue;
            }
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            let idf = self.idf(term);
            for p in postings {
                let contribution = weight * idf * self.saturation(p.tf, self.doc_lengths[p.doc as usize]);
                *acc.entry(p.doc).or_insert(0.0) += contribution;
            }
        }
        let scored: Vec<(String, f64)> = acc
            .into_iter()
            .map(|(ord, s)| (self.doc_ids[ord as usize].clone(), s * query.effective_len))
            .collect();
        rank_hits_top_k(scored, k)
    }
}

/// BM25 retrieval for a topic: tokenize with the index's language, build a
/// plain weighted query, rank the matching documents.
pub fn search_bm25(index: &InvertedIndex, topic: &Topic, k: usize) -> Vec<ScoredHit> {
    let tokens = tokenize(&topic.text, index.language());
    if tokens.is_empty() {
        return Vec::new();
    }
    index.search(&WeightedQuery::plain(&tokens), k)
}

/// BM25 retrieval followed by RM3 expansion and a full re-scoring pass with
/// the expanded query.
pub fn search_bm25_rm3(
    index: &InvertedIndex,
    topic: &Topic,
    k: usize,
    params: &Rm3Params,
) -> Result<Vec<ScoredHit>> {
    let tokens = tokenize(&topic.text, index.language());
    if tokens.is_empty() {
        return Ok(Vec::new());
    }
    let original = WeightedQuery::plain(&tokens);
    let initial = index.search(&original, k);
    let expanded = rm3_expand(index, &original, &initial, params)?;
    Ok(index.search(&expanded, k))
}
