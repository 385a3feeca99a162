//! Ranked result lists.

use serde::{Deserialize, Serialize};

/// One entry of a ranked result list (a document or a segment).
///
/// Within a list, scores are non-increasing, ranks run 1..=n, and score ties
/// are broken by ascending id. Every producer in this crate goes through
/// [`rank_hits`] so the ordering rule lives in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredHit {
    pub doc_id: String,
    pub score: f64,
    /// 1-based rank.
    pub rank: u32,
}

/// Sort `(id, score)` pairs into a ranked list: score descending, ties by
/// ascending id, ranks assigned from 1.
pub fn rank_hits(mut scored: Vec<(String, f64)>) -> Vec<ScoredHit> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored
        .into_iter()
        .enumerate()
        .map(|(i, (doc_id, score))| ScoredHit {
            doc_id,
            score,
            rank: i as u32 + 1,
        })
        .collect()
}

/// Like [`rank_hits`] but keeps only the top `k`.
pub fn rank_hits_top_k(scored: Vec<(String, f64)>, k: usize) -> Vec<ScoredHit> {
    let mut hits = rank_hits(scored);
    hits.truncate(k);
    hits
}
