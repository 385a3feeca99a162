//! RM3 pseudo-relevance feedback.
//!
//! The relevance model is estimated from the top feedback documents of an
//! initial retrieval: each document contributes its maximum-likelihood term
//! distribution `tf/|d|`, weighted by its BM25 score normalized over the
//! feedback set. The top `fb_terms` terms are kept, renormalized, and
//! interpolated with the original query distribution:
//!
//! ```text
//! w(t) = orig_weight · P_orig(t) + (1 − orig_weight) · P_rm(t)
//! ```
//!
//! The output always sums to 1. With an empty feedback set (or
//! `fb_docs = 0`, or `fb_terms = 0`) the original query comes back unchanged.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hit::ScoredHit;
use crate::sparse::{InvertedIndex, WeightedQuery};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rm3Params {
    /// Feedback depth: how many top documents estimate the relevance model.
    pub fb_docs: usize,
    /// How many expansion terms to keep.
    pub fb_terms: usize,
    /// Interpolation weight of the original query, in [0, 1].
    pub orig_weight: f64,
}

impl Default for Rm3Params {
    fn default() -> Self {
        Self {
            fb_docs: 10,
            fb_terms: 10,
            orig_weight: 0.5,
        }
    }
}

/// Estimate the relevance model `P(t|R)` from the top `fb_docs` hits.
///
/// Returns the full term distribution before expansion-term truncation;
/// it sums to 1 whenever the feedback set is non-empty. The estimate walks
/// the vocabulary once, probing each postings list for the handful of
/// feedback ordinals.
pub fn relevance_model(
    index: &InvertedIndex,
    initial_hits: &[ScoredHit],
    fb_docs: usize,
) -> BTreeMap<String, f64> {
    let feedback = &initial_hits[..fb_docs.min(initial_hits.len())];
    let score_sum: f64 = feedback.iter().map(|h| h.score.max(0.0)).sum();
    let mut model = BTreeMap::new();
    if score_sum <= 0.0 {
        return model;
    }

    // (ordinal, doc_weight / dl) per feedback doc, in rank order.
    let mut docs: Vec<(u32, f64)> = Vec::with_capacity(feedback.len());
    for hit in feedback {
        if hit.score <= 0.0 {
            continue;
        }
        let Some(ordinal) = index.ordinal(&hit.doc_id) else {
            continue;
        };
        let dl = index.doc_length(ordinal) as f64;
        if dl == 0.0 {
            continue;
        }
        docs.push((ordinal, hit.score / score_sum / dl));
    }

    for (term, postings) in index.postings_iter() {
        let mut mass = 0.0;
        for &(ordinal, weight_over_dl) in &docs {
            if let Ok(pos) = postings.binary_search_by_key(&ordinal, |p| p.doc) {
                mass += weight_over_dl * postings[pos].tf as f64;
            }
        }
        if mass > 0.0 {
            model.insert(term.clone(), mass);
        }
    }
    model
}

/// Expand a query with RM3. The initial hits must be sorted best-first, as
/// produced by [`InvertedIndex::search`].
pub fn rm3_expand(
    index: &InvertedIndex,
    original: &WeightedQuery,
    initial_hits: &[ScoredHit],
    params: &Rm3Params,
) -> Result<WeightedQuery> {
    if !(0.0..=1.0).contains(&params.orig_weight) {
        return Err(Error::InvalidConfig(format!(
            "orig_weight must be in [0, 1], got {}",
            params.orig_weight
        )));
    }
    if initial_hits.is_empty() || params.fb_docs == 0 || params.fb_terms == 0 {
        return Ok(original.clone());
    }

    let model = relevance_model(index, initial_hits, params.fb_docs);
    if model.is_empty() {
        return Ok(original.clone());
    }

    // Keep the top fb_terms by probability (ties by term, ascending) and
    // renormalize so the kept mass is a distribution again.
    let mut terms: Vec<(&String, &f64)> = model.iter().collect();
    terms.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
    terms.truncate(params.fb_terms);
    let kept_mass: f64 = terms.iter().map(|(_, &p)| p).sum();

    // Zero contributions stay out of the map so either endpoint returns
    // exactly the surviving distribution.
    let orig_mass: f64 = original.weights.values().sum();
    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    if orig_mass > 0.0 && params.orig_weight > 0.0 {
        for (term, &w) in &original.weights {
            weights.insert(term.clone(), params.orig_weight * w / orig_mass);
        }
    }
    if params.orig_weight < 1.0 {
        for (term, &p) in terms {
            *weights.entry(term.clone()).or_insert(0.0) +=
                (1.0 - params.orig_weight) * p / kept_mass;
        }
    }

    Ok(WeightedQuery {
        weights,
        effective_len: 1.0,
    })
}
