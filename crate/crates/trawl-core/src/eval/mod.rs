//! trec_eval-compatible evaluation: qrels and runs, AP / P@20 / nDCG@20,
//! paired randomization significance testing, and baseline selection.

mod metrics;
mod sigtest;
mod trec;

pub use metrics::{average_precision, ndcg_at, precision_at, topic_metrics, TopicMetrics};
pub use sigtest::{exhaustive_p, monte_carlo_p, paired_randomization_test, EXHAUSTIVE_LIMIT};
pub use trec::{parse_qrels, parse_run, write_run};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hit::ScoredHit;
use crate::par;

/// Evaluation depth for average precision.
pub const AP_CUTOFF: usize = 1000;
/// Rank cutoff for P@k and nDCG@k.
pub const PRECISION_K: usize = 20;
pub const NDCG_K: usize = 20;

/// Graded relevance judgments: topic -> doc -> grade (>= 0).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    pub topics: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn judgments(&self, topic: &str) -> Option<&BTreeMap<String, u32>> {
        self.topics.get(topic)
    }

    /// Number of relevant (grade > 0) docs for a topic.
    pub fn relevant_count(&self, topic: &str) -> usize {
        self.topics
            .get(topic)
            .map_or(0, |j| j.values().filter(|&&g| g > 0).count())
    }

    /// Topics with at least one relevant document; only these enter metric
    /// aggregation, matching trec_eval.
    pub fn evaluable_topics(&self) -> Vec<String> {
        self.topics
            .iter()
            .filter(|(_, j)| j.values().any(|&g| g > 0))
            .map(|(t, _)| t.clone())
            .collect()
    }
}

/// A ranked, scored retrieval run: topic -> [(doc, score)] plus a tag.
/// List order is the ranking; producers in this crate always emit
/// score-descending lists with ties broken by ascending doc id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Run {
    pub topics: BTreeMap<String, Vec<(String, f64)>>,
    pub tag: String,
}

impl Run {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            topics: BTreeMap::new(),
            tag: tag.into(),
        }
    }

    pub fn insert_hits(&mut self, topic_id: impl Into<String>, hits: Vec<ScoredHit>) {
        self.topics.insert(
            topic_id.into(),
            hits.into_iter().map(|h| (h.doc_id, h.score)).collect(),
        );
    }

    pub fn ranking(&self, topic: &str) -> &[(String, f64)] {
        self.topics.get(topic).map_or(&[], Vec::as_slice)
    }

    /// Truncate every topic list to `depth`.
    pub fn truncated(&self, depth: usize) -> Run {
        Run {
            topics: self
                .topics
                .iter()
                .map(|(t, l)| (t.clone(), l.iter().take(depth).cloned().collect()))
                .collect(),
            tag: self.tag.clone(),
        }
    }
}

/// Per-topic and mean metrics for one run against one qrels set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub tag: String,
    pub per_topic: BTreeMap<String, TopicMetrics>,
    pub mean_ap: f64,
    pub mean_p20: f64,
    pub mean_ndcg20: f64,
    /// Topics that entered the means: present in the run and judged with at
    /// least one relevant document.
    pub evaluated_topics: usize,
}

/// Evaluate a run. Following trec_eval, only topics present in the run and
/// holding at least one relevant judgment enter the aggregation; unjudged
/// run topics are ignored.
pub fn evaluate_run(run: &Run, qrels: &Qrels) -> MetricReport {
    let topics: Vec<(&String, &Vec<(String, f64)>)> = run
        .topics
        .iter()
        .filter(|(t, _)| qrels.relevant_count(t) > 0)
        .collect();

    let computed: Vec<(String, TopicMetrics)> = par::map_ref_collect(&topics, |(topic, ranked)| {
        let judgments = qrels.judgments(topic).expect("filtered to judged topics");
        let metrics = topic_metrics(ranked, judgments).expect("topic has relevant docs");
        ((*topic).clone(), metrics)
    });

    let per_topic: BTreeMap<String, TopicMetrics> = computed.into_iter().collect();
    let n = per_topic.len().max(1) as f64;
    let mean = |f: fn(&TopicMetrics) -> f64| per_topic.values().map(f).sum::<f64>() / n;

    MetricReport {
        tag: run.tag.clone(),
        per_topic: per_topic.clone(),
        mean_ap: mean(|m| m.ap),
        mean_p20: mean(|m| m.p20),
        mean_ndcg20: mean(|m| m.ndcg20),
        evaluated_topics: per_topic.len(),
    }
}

/// Baseline selection rule: keep whichever term-matching model has the
/// higher mean P@20; ties go to BM25 (the first argument).
pub fn pick_term_baseline<'a>(
    report_bm25: &'a MetricReport,
    report_rm3: &'a MetricReport,
) -> &'a str {
    if report_rm3.mean_p20 > report_bm25.mean_p20 {
        &report_rm3.tag
    } else {
        &report_bm25.tag
    }
}
