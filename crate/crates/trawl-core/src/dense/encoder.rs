//! Embedding providers.
//!
//! Neural encoders never link into this crate; they integrate by writing
//! vector files. [`FileVectorStore`] serves those precomputed vectors by id.
//! [`HashingEncoder`] is the built-in deterministic encoder: signed feature
//! hashing of tokens into a fixed number of buckets, L2-normalized. It is
//! language-agnostic and gives topical similarity good enough to exercise
//! the full pipeline end to end.

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::{tokenize, Segment, Topic};
use crate::dense::EmbeddingVector;
use crate::error::{Error, Result};
use crate::rng::fnv1a64;

/// Source of query and passage embeddings. Implementations must be
/// deterministic: the same input yields bitwise-equal vectors.
pub trait EmbeddingProvider {
    fn dimension(&self) -> usize;
    fn embed_query(&self, topic: &Topic) -> Result<EmbeddingVector>;
    fn embed_passage(&self, segment: &Segment) -> Result<EmbeddingVector>;
}

/// Signed feature-hashing encoder.
#[derive(Debug, Clone)]
pub struct HashingEncoder {
    dim: usize,
    language: String,
}

impl HashingEncoder {
    pub const DEFAULT_DIM: usize = 256;

    pub fn new(dim: usize, language: impl Into<String>) -> Self {
        Self {
            dim,
            language: language.into(),
        }
    }

    /// Hash each token into a bucket with a sign bit, then L2-normalize.
    /// Text with no tokens embeds to the zero vector.
    pub fn embed_text(&self, text: &str) -> Vec<f32> {
        let mut v = vec![0.0f32; self.dim];
        for token in tokenize(text, &self.language) {
            let h = fnv1a64(token.as_bytes());
            let bucket = (h % self.dim as u64) as usize;
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            v[bucket] += sign;
        }
        let norm: f32 = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }
}

impl EmbeddingProvider for HashingEncoder {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn embed_query(&self, topic: &Topic) -> Result<EmbeddingVector> {
        Ok(EmbeddingVector::new(topic.id.clone(), self.embed_text(&topic.text)))
    }

    fn embed_passage(&self, segment: &Segment) -> Result<EmbeddingVector> {
        Ok(EmbeddingVector::new(
            segment.segment_id.clone(),
            self.embed_text(&segment.text),
        ))
    }
}

/// Precomputed vectors keyed by id, loaded from a vector file. The lookup
/// ignores the text entirely; ids must match between the store and the
/// topics/segments being embedded.
#[derive(Debug, Clone)]
pub struct FileVectorStore {
    dim: usize,
    vectors: HashMap<String, Vec<f32>>,
}

impl FileVectorStore {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_vectors(crate::dense::read_vectors(path)?)
    }

    pub fn from_vectors(vectors: Vec<EmbeddingVector>) -> Result<Self> {
        let dim = vectors.first().map_or(0, EmbeddingVector::dimension);
        let mut map = HashMap::with_capacity(vectors.len());
        for v in vectors {
            if v.dimension() != dim {
                return Err(Error::DimensionMismatch {
                    id: v.id.clone(),
                    expected: dim,
                    got: v.dimension(),
                });
            }
            if map.insert(v.id.clone(), v.components).is_some() {
                return Err(Error::DuplicateVectorId { id: v.id });
            }
        }
        Ok(Self { dim, vectors: map })
    }

    fn get(&self, id: &str) -> Result<EmbeddingVector> {
        self.vectors
            .get(id)
            .map(|c| EmbeddingVector::new(id.to_string(), c.clone()))
            .ok_or_else(|| Error::MissingVector { id: id.to_string() })
    }
}

impl EmbeddingProvider for FileVectorStore {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn embed_query(&self, topic: &Topic) -> Result<EmbeddingVector> {
        self.get(&topic.id)
    }

    fn embed_passage(&self, segment: &Segment) -> Result<EmbeddingVector> {
        self.get(&segment.segment_id)
    }
}
