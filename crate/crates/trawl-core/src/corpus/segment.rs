//! Sliding-window segmentation for dense indexing.

use serde::{Deserialize, Serialize};

use crate::corpus::{split_sentences, Document};
use crate::error::{Error, Result};

/// A fixed-window slice of a document's sentences: the unit of dense indexing.
///
/// `segment_id` is `<doc_id>#<window ordinal>`, where the ordinal counts
/// windows from 0 in document order. [`parent_doc_id`](Segment::parent_doc_id)
/// carries the mapping back explicitly; nothing downstream parses the id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub segment_id: String,
    pub parent_doc_id: String,
    /// 0-based index of the first sentence in the window.
    pub start_sentence: usize,
    pub text: String,
}

/// Number of segments for a document with `sentences` sentences under the
/// given window and stride: 1 when the document fits in one window, else
/// `floor((sentences - window) / stride) + 1`.
pub fn segment_count(sentences: usize, window: usize, stride: usize) -> usize {
    if sentences <= window {
        1
    } else {
        (sentences - window) / stride + 1
    }
}

/// Slice a document into sentence windows of `window` sentences advancing by
/// `stride`. A document shorter than one window yields a single segment with
/// everything in it.
pub fn segment_document(doc: &Document, window: usize, stride: usize) -> Result<Vec<Segment>> {
    if window == 0 {
        return Err(Error::InvalidConfig("window must be >= 1".to_string()));
    }
    if stride == 0 {
        return Err(Error::InvalidConfig("stride must be >= 1".to_string()));
    }
    let sentences = split_sentences(&doc.text);
    if sentences.is_empty() {
        return Err(Error::EmptyDocument {
            doc_id: doc.id.clone(),
        });
    }

    let count = segment_count(sentences.len(), window, stride);
    let mut segments = Vec::with_capacity(count);
    for ordinal in 0..count {
        let start = ordinal * stride;
        let end = (start + window).min(sentences.len());
        segments.push(Segment {
            segment_id: format!("{}#{}", doc.id, ordinal),
            parent_doc_id: doc.id.clone(),
            start_sentence: start,
            text: sentences[start..end].join(" "),
        });
    }
    Ok(segments)
}
