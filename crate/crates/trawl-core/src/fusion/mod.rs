//! Linear score fusion of a sparse and a dense run.
//!
//! The fused document score is `S_doc = α·S_term + (1−α)·S_dense` over the
//! union of both runs' candidates, with 0 standing in for a score missing
//! from either side. Optional per-topic min-max normalization maps each
//! run's scores to [0, 1] before interpolation; the default is raw-score
//! interpolation, the literal formula.
//!
//! Note the documented hazard of raw mode: inner products can be negative,
//! so a document absent from the dense run (S_dense = 0) can outrank one
//! that was retrieved with a negative score. Min-max mode removes the
//! anomaly.

mod cv;

pub use cv::{
    cross_validate_alpha, cross_validate_with_observer, write_cv_report, CvReport, FoldReport,
    TopicOutcome,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Run;
use crate::hit::rank_hits;

/// Per-run, per-topic score normalization applied before interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScoreNormalization {
    /// Interpolate raw scores (the default).
    #[default]
    None,
    /// Map each topic's scores to [0, 1]; a constant-score list maps to all
    /// ones.
    MinMax,
}

impl ScoreNormalization {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Self::None),
            "minmax" => Some(Self::MinMax),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::MinMax => "minmax",
        }
    }
}

/// Metric maximized by cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Ap,
    P20,
    Ndcg20,
}

impl Objective {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ap" | "map" => Some(Self::Ap),
            "p20" => Some(Self::P20),
            "ndcg20" | "ndcg" => Some(Self::Ndcg20),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ap => "ap",
            Self::P20 => "p20",
            Self::Ndcg20 => "ndcg20",
        }
    }

    pub fn of(self, metrics: &crate::eval::TopicMetrics) -> f64 {
        match self {
            Self::Ap => metrics.ap,
            Self::P20 => metrics.p20,
            Self::Ndcg20 => metrics.ndcg20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionConfig {
    /// Interpolation weight of the sparse (term-matching) score, in [0, 1].
    pub alpha: f64,
    /// Input truncation depth for the sparse run.
    pub sparse_depth: usize,
    /// Input truncation depth for the dense run.
    pub dense_depth: usize,
    pub normalization: ScoreNormalization,
    /// Candidate alphas for cross-validation; strictly increasing in [0, 1].
    pub alpha_grid: Vec<f64>,
    /// Cross-validation folds.
    pub folds: usize,
    pub objective: Objective,
    /// Truncate fused output lists; `None` keeps the full candidate union.
    pub output_depth: Option<usize>,
    /// Seed of the fold-assignment shuffle.
    pub seed: u64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            sparse_depth: 1000,
            dense_depth: 100,
            normalization: ScoreNormalization::None,
            alpha_grid: default_alpha_grid(),
            folds: 5,
            objective: Objective::Ap,
            output_depth: None,
            seed: 0,
        }
    }
}

/// 0.0 to 1.0 in steps of 0.1.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidConfig("alpha grid is empty".into()));
        }
        for w in self.alpha_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig(
                    "alpha grid must be strictly increasing".into(),
                ));
            }
        }
        if self.alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidConfig("alpha grid values must be in [0, 1]".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidConfig("folds must be >= 2".into()));
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }
}

/// A fused ranking: topic -> ranked (doc_id, S_doc) with unique doc ids,
/// scores non-increasing, ties by ascending doc id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FusedRun {
    pub topics: BTreeMap<String, Vec<(String, f64)>>,
}

impl FusedRun {
    pub fn ranking(&self, topic: &str) -> &[(String, f64)] {
        self.topics.get(topic).map_or(&[], Vec::as_slice)
    }

    pub fn into_run(self, tag: impl Into<String>) -> Run {
        Run {
            topics: self.topics,
            tag: tag.into(),
        }
    }
}

/// Fuse a sparse and a dense run. The topic set is the union of both runs';
/// a topic missing from one side is treated as an empty list there.
pub fn fuse(sparse: &Run, dense: &Run, config: &FusionConfig) -> Result<FusedRun> {
    config.validate()?;
    let mut topics: Vec<&String> = sparse.topics.keys().chain(dense.topics.keys()).collect();
    topics.sort();
    topics.dedup();

    let mut fused = FusedRun::default();
    for topic in topics {
        let sparse_scores = normalized_scores(sparse.ranking(topic), config.sparse_depth, config.normalization);
        let dense_scores = normalized_scores(dense.ranking(topic), config.dense_depth, config.normalization);

        let mut candidates: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
        for (doc, s) in &sparse_scores {
            candidates.entry(doc).or_insert((0.0, 0.0)).0 = *s;
        }
        for (doc, s) in &dense_scores {
            candidates.entry(doc).or_insert((0.0, 0.0)).1 = *s;
        }

        let scored: Vec<(String, f64)> = candidates
            .into_iter()
            .map(|(doc, (s_term, s_dense))| {
                (
                    doc.to_string(),
                    config.alpha * s_term + (1.0 - config.alpha) * s_dense,
                )
            })
            .collect();
        let mut ranked: Vec<(String, f64)> = rank_hits(scored)
            .into_iter()
            .map(|h| (h.doc_id, h.score))
            .collect();
        if let Some(depth) = config.output_depth {
            ranked.truncate(depth);
        }
        fused.topics.insert(topic.clone(), ranked);
    }
    Ok(fused)
}

/// Truncate to `depth` and optionally min-max normalize one topic's scores.
fn normalized_scores(
    ranking: &[(String, f64)],
    depth: usize,
    normalization: ScoreNormalization,
) -> Vec<(String, f64)> {
    let slice = &ranking[..depth.min(ranking.len())];
    match normalization {
        ScoreNormalization::None => slice.to_vec(),
        ScoreNormalization::MinMax => {
            if slice.is_empty() {
                return Vec::new();
            }
            let min = slice.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
            let max = slice.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
            if max == min {
                // Degenerate constant-score list: define everything as 1.
                slice.iter().map(|(d, _)| (d.clone(), 1.0)).collect()
            } else {
                slice
                    .iter()
                    .map(|(d, s)| (d.clone(), (s - min) / (max - min)))
                    .collect()
            }
        }
    }
}
