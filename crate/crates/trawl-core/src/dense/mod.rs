//! Dense segment index: exact inner-product search and top-m aggregation of
//! segment scores into document scores.
//!
//! Search is an exact full scan with no approximate structures, so the
//! ranking is reproducible and directly checkable against a brute-force
//! oracle. At the collection sizes this crate targets (up to about a
//! million segments) a scan is entirely tractable, and the row products
//! parallelize cleanly.

mod encoder;
mod storage;

pub use encoder::{EmbeddingProvider, FileVectorStore, HashingEncoder};
pub use storage::{read_vectors, read_vectors_binary, read_vectors_text, write_vectors_binary,
                  write_vectors_text, VectorFileFormat};

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::hit::{rank_hits, ScoredHit};
use crate::par;

/// A d-dimensional embedding keyed by segment or topic id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    pub id: String,
    pub components: Vec<f32>,
}

impl EmbeddingVector {
    pub fn new(id: impl Into<String>, components: Vec<f32>) -> Self {
        Self {
            id: id.into(),
            components,
        }
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    fn check_finite(&self) -> Result<()> {
        if self.components.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFiniteVector {
                id: self.id.clone(),
            })
        }
    }
}

/// Immutable matrix of segment embeddings with the segment -> document map.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseIndex {
    dim: usize,
    /// Row-major storage, one row per segment.
    data: Vec<f32>,
    ids: Vec<String>,
    /// Parent doc id per row, parallel to `ids`.
    parents: Vec<String>,
    ordinals: HashMap<String, u32>,
}

/// Build a dense index from segment vectors. Every id must be unique, every
/// vector the same dimension and finite, and every id resolvable through
/// `parent_map`.
pub fn build_dense_index(
    vectors: &[EmbeddingVector],
    parent_map: &HashMap<String, String>,
) -> Result<DenseIndex> {
    if vectors.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let dim = vectors[0].dimension();
    let mut data = Vec::with_capacity(vectors.len() * dim);
    let mut ids = Vec::with_capacity(vectors.len());
    let mut parents = Vec::with_capacity(vectors.len());
    let mut ordinals = HashMap::with_capacity(vectors.len());

    for v in vectors {
        if v.dimension() != dim {
            return Err(Error::DimensionMismatch {
                id: v.id.clone(),
                expected: dim,
                got: v.dimension(),
            });
        }
        v.check_finite()?;
        let parent = parent_map.get(&v.id).ok_or_else(|| Error::UnknownSegment {
            segment_id: v.id.clone(),
        })?;
        if ordinals.insert(v.id.clone(), ids.len() as u32).is_some() {
            return Err(Error::DuplicateVectorId { id: v.id.clone() });
        }
        data.extend_from_slice(&v.components);
        ids.push(v.id.clone());
        parents.push(parent.clone());
    }

    Ok(DenseIndex {
        dim,
        data,
        ids,
        parents,
        ordinals,
    })
}

impl DenseIndex {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn parent_of(&self, segment_id: &str) -> Option<&str> {
        self.ordinals
            .get(segment_id)
            .map(|&ord| self.parents[ord as usize].as_str())
    }

    fn row(&self, ordinal: usize) -> &[f32] {
        &self.data[ordinal * self.dim..(ordinal + 1) * self.dim]
    }

    /// Exact top-k segments by inner product `qᵀp`. Ties break by ascending
    /// segment id. Row products run in parallel when the `parallel` feature
    /// is on; each product is a sequential sum, so scores are bit-identical
    /// in both lanes.
    pub fn search(&self, query: &EmbeddingVector, k: usize) -> Result<Vec<ScoredHit>> {
        if query.dimension() != self.dim {
            return Err(Error::DimensionMismatch {
                id: query.id.clone(),
                expected: self.dim,
                got: query.dimension(),
            });
        }
        query.check_finite()?;
        let q = &query.components;
        // Batch rows per task: a single row product is far too small a work
        // unit to schedule on its own.
        let rows_per_task = (1 << 16) / self.dim.max(1);
        let scores: Vec<f64> =
            par::map_range_min_len(self.len(), rows_per_task, |i| dot(self.row(i), q));

        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        order.sort_by(|&a, &b| {
            scores[b as usize]
                .total_cmp(&scores[a as usize])
                .then_with(|| self.ids[a as usize].cmp(&self.ids[b as usize]))
        });
        order.truncate(k);
        Ok(order
            .into_iter()
            .enumerate()
            .map(|(rank, ord)| ScoredHit {
                doc_id: self.ids[ord as usize].clone(),
                score: scores[ord as usize],
                rank: rank as u32 + 1,
            })
            .collect())
    }

    /// Aggregate retrieved segment hits into document scores using this
    /// index's parent map.
    pub fn aggregate(&self, segment_hits: &[ScoredHit], m: usize) -> Result<Vec<ScoredHit>> {
        aggregate_segments(segment_hits, m, |segment_id| {
            self.parent_of(segment_id).map(str::to_string)
        })
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = (&str, &str, &[f32])> {
        (0..self.len()).map(move |i| (self.ids[i].as_str(), self.parents[i].as_str(), self.row(i)))
    }

    pub(crate) fn from_parts(
        dim: usize,
        ids: Vec<String>,
        parents: Vec<String>,
        data: Vec<f32>,
    ) -> Result<Self> {
        let mut ordinals = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if ordinals.insert(id.clone(), i as u32).is_some() {
                return Err(Error::DuplicateVectorId { id: id.clone() });
            }
        }
        Ok(Self {
            dim,
            data,
            ids,
            parents,
            ordinals,
        })
    }
}

/// Document score = mean of the document's `min(m, available)` best segment
/// scores among the retrieved hits. Documents rank by that mean, ties by
/// ascending doc id. `m = 1` is max-pooling.
pub fn aggregate_segments(
    segment_hits: &[ScoredHit],
    m: usize,
    resolve_parent: impl Fn(&str) -> Option<String>,
) -> Result<Vec<ScoredHit>> {
    if m == 0 {
        return Err(Error::InvalidConfig("aggregation m must be >= 1".into()));
    }
    let mut per_doc: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for hit in segment_hits {
        let doc = resolve_parent(&hit.doc_id).ok_or_else(|| Error::UnknownSegment {
            segment_id: hit.doc_id.clone(),
        })?;
        per_doc.entry(doc).or_default().push(hit.score);
    }
    let scored: Vec<(String, f64)> = per_doc
        .into_iter()
        .map(|(doc, mut scores)| {
            scores.sort_by(|a, b| b.total_cmp(a));
            let take = m.min(scores.len());
            let mean = scores[..take].iter().sum::<f64>() / take as f64;
            (doc, mean)
        })
        .collect();
    Ok(rank_hits(scored))
}

fn dot(row: &[f32], q: &[f32]) -> f64 {
    row.iter()
        .zip(q)
        .map(|(&a, &b)| a as f64 * b as f64)
        .sum()
}
