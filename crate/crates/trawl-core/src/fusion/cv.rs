//! Five-fold (by default) cross-validation of the interpolation weight.
//!
//! Judged topics are shuffled with a seeded generator and dealt round-robin
//! into folds. For each fold, the grid alpha maximizing the mean objective
//! over the *other* folds' topics is selected (ties go to the smaller
//! alpha), and the fold's own topics are then scored with that alpha. The
//! pooled report averages every topic's test-fold metrics, so no topic's
//! judgments ever influence the alpha it is evaluated with.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Topic;
use crate::error::{Error, Result};
use crate::eval::{topic_metrics, Qrels, Run, TopicMetrics};
use crate::fusion::{fuse, FusionConfig, Objective};
use crate::par;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    /// Alpha selected on the training folds.
    pub alpha: f64,
    pub train_topics: Vec<String>,
    pub test_topics: Vec<String>,
    /// Mean objective of the test topics under the selected alpha.
    pub mean_test_objective: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicOutcome {
    pub topic: String,
    /// The fold this topic was tested in.
    pub fold: usize,
    /// The alpha it was tested with.
    pub alpha: f64,
    pub metrics: TopicMetrics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub objective: Objective,
    pub folds: Vec<FoldReport>,
    /// One outcome per judged topic, sorted by topic id.
    pub per_topic: Vec<TopicOutcome>,
    /// Means of the per-topic test metrics.
    pub pooled_ap: f64,
    pub pooled_p20: f64,
    pub pooled_ndcg20: f64,
    /// Alpha maximizing the mean objective over all judged topics; the
    /// deployable single choice, reported alongside the per-fold selections.
    pub global_alpha: f64,
}

/// Cross-validate the interpolation weight over `config.alpha_grid`.
pub fn cross_validate_alpha(
    topics: &[Topic],
    qrels: &Qrels,
    sparse: &Run,
    dense: &Run,
    config: &FusionConfig,
) -> Result<CvReport> {
    cross_validate_with_observer(topics, qrels, sparse, dense, config, &mut |_, _| {})
}

/// Like [`cross_validate_alpha`], reporting every (fold, topic) pair whose
/// judgments contribute to that fold's alpha selection. Tests use the
/// observer to verify that no topic influences its own test alpha.
pub fn cross_validate_with_observer(
    topics: &[Topic],
    qrels: &Qrels,
    sparse: &Run,
    dense: &Run,
    config: &FusionConfig,
    observer: &mut dyn FnMut(usize, &str),
) -> Result<CvReport> {
    config.validate()?;

    // Judged topics only, deterministically dealt into folds: sort, seeded
    // shuffle, round-robin.
    let mut eligible: Vec<String> = topics
        .iter()
        .filter(|t| qrels.relevant_count(&t.id) > 0)
        .map(|t| t.id.clone())
        .collect();
    eligible.sort();
    eligible.dedup();
    if eligible.len() < config.folds {
        return Err(Error::TooFewTopics {
            folds: config.folds,
            topics: eligible.len(),
        });
    }
    SplitMix64::new(config.seed).shuffle(&mut eligible);
    let fold_of: BTreeMap<&str, usize> = eligible
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i % config.folds))
        .collect();

    // Metric matrix: per grid point, per topic. Topics missing from the
    // fused run evaluate as an empty ranking.
    let matrix: Vec<Result<BTreeMap<String, TopicMetrics>>> =
        par::map_ref_collect(&config.alpha_grid, |&alpha| {
            let fused = fuse(sparse, dense, &config.with_alpha(alpha))?;
            let mut per_topic = BTreeMap::new();
            for topic in &eligible {
                let judgments = qrels.judgments(topic).expect("eligible topics are judged");
                let metrics = topic_metrics(fused.ranking(topic), judgments)
                    .expect("eligible topics have relevant docs");
                per_topic.insert(topic.clone(), metrics);
            }
            Ok(per_topic)
        });
    let matrix: Vec<BTreeMap<String, TopicMetrics>> =
        matrix.into_iter().collect::<Result<_>>()?;

    let objective = config.objective;
    let select = |topic_set: &dyn Fn(&str) -> bool| -> (usize, f64) {
        let mut best_idx = 0;
        let mut best_value = f64::NEG_INFINITY;
        for (idx, per_topic) in matrix.iter().enumerate() {
            let (sum, n) = per_topic
                .iter()
                .filter(|(t, _)| topic_set(t))
                .fold((0.0, 0usize), |(s, n), (_, m)| (s + objective.of(m), n + 1));
            let mean = if n == 0 { 0.0 } else { sum / n as f64 };
            if mean > best_value {
                best_value = mean;
                best_idx = idx;
            }
        }
        (best_idx, best_value)
    };

    let mut folds = Vec::with_capacity(config.folds);
    let mut outcomes: Vec<TopicOutcome> = Vec::with_capacity(eligible.len());
    for fold in 0..config.folds {
        let mut train_topics: Vec<String> = Vec::new();
        let mut test_topics: Vec<String> = Vec::new();
        for topic in &eligible {
            if fold_of[topic.as_str()] == fold {
                test_topics.push(topic.clone());
            } else {
                observer(fold, topic);
                train_topics.push(topic.clone());
            }
        }
        train_topics.sort();
        test_topics.sort();

        let in_train: std::collections::HashSet<&str> =
            train_topics.iter().map(String::as_str).collect();
        let (alpha_idx, _) = select(&|t| in_train.contains(t));
        let alpha = config.alpha_grid[alpha_idx];

        let mut test_sum = 0.0;
        for topic in &test_topics {
            let metrics = matrix[alpha_idx][topic];
            test_sum += objective.of(&metrics);
            outcomes.push(TopicOutcome {
                topic: topic.clone(),
                fold,
                alpha,
                metrics,
            });
        }
        folds.push(FoldReport {
            fold,
            alpha,
            mean_test_objective: test_sum / test_topics.len().max(1) as f64,
            train_topics,
            test_topics,
        });
    }

    outcomes.sort_by(|a, b| a.topic.cmp(&b.topic));
    let n = outcomes.len().max(1) as f64;
    let (global_idx, _) = select(&|_| true);

    Ok(CvReport {
        objective,
        pooled_ap: outcomes.iter().map(|o| o.metrics.ap).sum::<f64>() / n,
        pooled_p20: outcomes.iter().map(|o| o.metrics.p20).sum::<f64>() / n,
        pooled_ndcg20: outcomes.iter().map(|o| o.metrics.ndcg20).sum::<f64>() / n,
        global_alpha: config.alpha_grid[global_idx],
        folds,
        per_topic: outcomes,
    })
}

/// Write the fold report as line-delimited records: one `fold` line per
/// fold, one `topic` line per judged topic, one trailing `summary` line.
pub fn write_cv_report(report: &CvReport, path: &Path) -> Result<()> {
    #[derive(Serialize)]
    #[serde(tag = "kind")]
    enum Line<'a> {
        #[serde(rename = "fold")]
        Fold {
            fold: usize,
            alpha: f64,
            mean_test_objective: f64,
            test_topics: &'a [String],
        },
        #[serde(rename = "topic")]
        Topic {
            topic: &'a str,
            fold: usize,
            alpha: f64,
            ap: f64,
            p20: f64,
            ndcg20: f64,
        },
        #[serde(rename = "summary")]
        Summary {
            objective: &'a str,
            global_alpha: f64,
            pooled_ap: f64,
            pooled_p20: f64,
            pooled_ndcg20: f64,
        },
    }

    let file = std::fs::File::create(path).map_err(|e| crate::error::io_err(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut emit = |line: &Line| -> Result<()> {
        serde_json::to_writer(&mut w, line).map_err(|e| crate::error::io_err(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| crate::error::io_err(path, e))
    };

    for f in &report.folds {
        emit(&Line::Fold {
            fold: f.fold,
            alpha: f.alpha,
            mean_test_objective: f.mean_test_objective,
            test_topics: &f.test_topics,
        })?;
    }
    for o in &report.per_topic {
        emit(&Line::Topic {
            topic: &o.topic,
            fold: o.fold,
            alpha: o.alpha,
            ap: o.metrics.ap,
            p20: o.metrics.p20,
            ndcg20: o.metrics.ndcg20,
        })?;
    }
    emit(&Line::Summary {
        objective: report.objective.as_str(),
        global_alpha: report.global_alpha,
        pooled_ap: report.pooled_ap,
        pooled_p20: report.pooled_p20,
        pooled_ndcg20: report.pooled_ndcg20,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topic(id: &str) -> Topic {
        Topic {
            id: id.to_string(),
            text: String::new(),
        }
    }

    /// Fixture: per topic, docs d0..d5 with d0..d2 relevant. The dense run
    /// ranks relevant docs first (qrels-perfect); the sparse run ranks them
    /// last (reversed).
    fn perfect_dense_fixture(n_topics: usize) -> (Vec<Topic>, Qrels, Run, Run) {
        let mut topics = Vec::new();
        let mut qrels = Qrels::default();
        let mut sparse = Run::new("sparse");
        let mut dense = Run::new("dense");
        for i in 0..n_topics {
            let tid = format!("t{i:02}");
            topics.push(topic(&tid));
            let judged: BTreeMap<String, u32> = (0..6)
                .map(|d| (format!("d{d}"), u32::from(d < 3)))
                .collect();
            qrels.topics.insert(tid.clone(), judged);
            let dense_list: Vec<(String, f64)> =
                (0..6).map(|d| (format!("d{d}"), 6.0 - d as f64)).collect();
            let sparse_list: Vec<(String, f64)> =
                (0..6).map(|d| (format!("d{d}"), 1.0 + d as f64)).collect();
            dense.topics.insert(tid.clone(), {
                let mut l = dense_list;
                l.sort_by(|a, b| b.1.total_cmp(&a.1));
                l
            });
            sparse.topics.insert(tid.clone(), {
                let mut l = sparse_list;
                l.sort_by(|a, b| b.1.total_cmp(&a.1));
                l
            });
        }
        (topics, qrels, sparse, dense)
    }

    #[test]
    fn single_grid_value_selected_everywhere() {
        let (topics, qrels, sparse, dense) = perfect_dense_fixture(10);
        let config = FusionConfig {
            alpha_grid: vec![0.3],
            ..Default::default()
        };
        let report = cross_validate_alpha(&topics, &qrels, &sparse, &dense, &config).unwrap();
        assert!(report.folds.iter().all(|f| f.alpha == 0.3));
        assert_eq!(report.global_alpha, 0.3);
    }

    #[test]
    fn perfect_dense_run_selects_alpha_zero_with_pooled_ap_one() {
        let (topics, qrels, sparse, dense) = perfect_dense_fixture(10);
        let config = FusionConfig::default();
        let report = cross_validate_alpha(&topics, &qrels, &sparse, &dense, &config).unwrap();
        assert!(report.folds.iter().all(|f| f.alpha == 0.0), "{:?}", report.folds);
        assert!((report.pooled_ap - 1.0).abs() < 1e-12);
        assert_eq!(report.global_alpha, 0.0);
    }

    #[test]
    fn folds_partition_topics() {
        let (topics, qrels, sparse, dense) = perfect_dense_fixture(13);
        let report =
            cross_validate_alpha(&topics, &qrels, &sparse, &dense, &FusionConfig::default())
                .unwrap();
        let mut seen: Vec<&str> = Vec::new();
        for fold in &report.folds {
            for t in &fold.test_topics {
                seen.push(t);
            }
        }
        seen.sort();
        assert_eq!(seen.len(), 13);
        let unique: std::collections::HashSet<_> = seen.iter().collect();
        assert_eq!(unique.len(), 13);
    }

    #[test]
    fn observer_sees_no_test_topic_in_its_own_training() {
        let (topics, qrels, sparse, dense) = perfect_dense_fixture(11);
        let mut observed: Vec<(usize, String)> = Vec::new();
        let report = cross_validate_with_observer(
            &topics,
            &qrels,
            &sparse,
            &dense,
            &FusionConfig::default(),
            &mut |fold, topic| observed.push((fold, topic.to_string())),
        )
        .unwrap();
        for fold in &report.folds {
            for test_topic in &fold.test_topics {
                assert!(
                    !observed.contains(&(fold.fold, test_topic.clone())),
                    "topic {test_topic} leaked into fold {} training",
                    fold.fold
                );
            }
        }
    }

    #[test]
    fn too_few_topics_is_an_error() {
        let (topics, qrels, sparse, dense) = perfect_dense_fixture(3);
        let result =
            cross_validate_alpha(&topics, &qrels, &sparse, &dense, &FusionConfig::default());
        assert!(matches!(result, Err(Error::TooFewTopics { .. })));
    }

    #[test]
    fn fold_assignment_deterministic_per_seed() {
        let (topics, qrels, sparse, dense) = perfect_dense_fixture(15);
        let config = FusionConfig::default();
        let a = cross_validate_alpha(&topics, &qrels, &sparse, &dense, &config).unwrap();
        let b = cross_validate_alpha(&topics, &qrels, &sparse, &dense, &config).unwrap();
        for (fa, fb) in a.folds.iter().zip(&b.folds) {
            assert_eq!(fa.test_topics, fb.test_topics);
        }
        let other_seed = FusionConfig {
            seed: 99,
            ..config
        };
        let c = cross_validate_alpha(&topics, &qrels, &sparse, &dense, &other_seed).unwrap();
        let differs = a
            .folds
            .iter()
            .zip(&c.folds)
            .any(|(x, y)| x.test_topics != y.test_topics);
        assert!(differs, "different seeds should shuffle folds differently");
    }
}
