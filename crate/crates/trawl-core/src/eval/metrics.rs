//! Rank metrics in trec_eval's formulations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eval::{AP_CUTOFF, NDCG_K, PRECISION_K};

/// AP, P@20 and nDCG@20 for one topic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopicMetrics {
    pub ap: f64,
    pub p20: f64,
    pub ndcg20: f64,
}

/// All three metrics at the standard cutoffs, or `None` when the topic has
/// no relevant documents and is excluded from aggregation.
pub fn topic_metrics(
    ranked: &[(String, f64)],
    judgments: &BTreeMap<String, u32>,
) -> Option<TopicMetrics> {
    Some(TopicMetrics {
        ap: average_precision(ranked, judgments, AP_CUTOFF)?,
        p20: precision_at(ranked, judgments, PRECISION_K),
        ndcg20: ndcg_at(ranked, judgments, NDCG_K)?,
    })
}

/// Average precision to `cutoff`:
/// `AP = (1/R) Σ_{rank k relevant, k <= cutoff} Precision@k`
/// where `R` counts all relevant docs in the judgments, not capped at the
/// cutoff (trec_eval `map` semantics). `None` when `R = 0`.
pub fn average_precision(
    ranked: &[(String, f64)],
    judgments: &BTreeMap<String, u32>,
    cutoff: usize,
) -> Option<f64> {
    let total_relevant = judgments.values().filter(|&&g| g > 0).count();
    if total_relevant == 0 {
        return None;
    }
    let mut hits = 0u32;
    let mut sum = 0.0;
    for (i, (doc, _)) in ranked.iter().take(cutoff).enumerate() {
        if judgments.get(doc).copied().unwrap_or(0) > 0 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Some(sum / total_relevant as f64)
}

/// Precision at `k` with trec_eval's fixed denominator: relevant docs in the
/// top `k` divided by `k`, even when fewer than `k` docs were retrieved.
pub fn precision_at(ranked: &[(String, f64)], judgments: &BTreeMap<String, u32>, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let relevant = ranked
        .iter()
        .take(k)
        .filter(|(doc, _)| judgments.get(doc).copied().unwrap_or(0) > 0)
        .count();
    relevant as f64 / k as f64
}

/// nDCG at `k` in trec_eval's `ndcg_cut` formulation: linear gain (the grade
/// itself) discounted by `log2(rank + 1)`, normalized by the ideal DCG over
/// the qrels grades sorted descending. `None` when the ideal DCG is zero.
pub fn ndcg_at(
    ranked: &[(String, f64)],
    judgments: &BTreeMap<String, u32>,
    k: usize,
) -> Option<f64> {
    let mut ideal_grades: Vec<u32> = judgments.values().copied().filter(|&g| g > 0).collect();
    ideal_grades.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal_grades
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| g as f64 / ((i + 2) as f64).log2())
        .sum();
    if idcg == 0.0 {
        return None;
    }
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, (doc, _))| {
            judgments.get(doc).copied().unwrap_or(0) as f64 / ((i + 2) as f64).log2()
        })
        .sum();
    Some(dcg / idcg)
}
