//! `pipeline`: corpus -> indexes -> runs -> cross-validated fusion ->
//! evaluation -> significance, in one invocation.
//!
//! Every artifact a standalone subcommand would produce lands in the output
//! directory under a fixed name, byte-identical to running the stages one
//! by one with the same configuration.

use std::path::{Path, PathBuf};

use clap::Args;

use trawl_core::corpus::{read_corpus, segment_document, Analyzer, LoadOptions, Segment};
use trawl_core::dense::{
    build_dense_index, write_vectors_binary, EmbeddingProvider, EmbeddingVector, HashingEncoder,
};
use trawl_core::eval::{
    evaluate_run, paired_randomization_test, parse_qrels, parse_run, pick_term_baseline,
    write_run, MetricReport, Run,
};
use trawl_core::fusion::{cross_validate_alpha, fuse, write_cv_report, ScoreNormalization};
use trawl_core::hit::ScoredHit;
use trawl_core::sparse::{build_index, search_bm25, search_bm25_rm3};
use trawl_core::{par, Error, Result};

use crate::commands::{parse_normalization, report_skipped, require_exists};
use crate::config::{load_config_file, ExperimentConfig};
use crate::manifest::Manifest;
use crate::report::write_metric_report_jsonl;

#[derive(Args)]
pub struct PipelineArgs {
    /// Experiment config file (flat key-value; flags override).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub topics: Option<PathBuf>,
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_normalization)]
    pub normalization: Option<ScoreNormalization>,
}

pub fn pipeline(args: PipelineArgs) -> Result<()> {
    // Resolve configuration: defaults <- file <- flags.
    let (mut config, echo) = match &args.config {
        Some(path) => {
            let (config, raw) = load_config_file(path)?;
            (config, Some(raw))
        }
        None => (ExperimentConfig::default(), None),
    };
    if let Some(corpus) = args.corpus {
        config.corpus = Some(corpus);
    }
    if let Some(topics) = args.topics {
        config.topics = Some(topics);
    }
    if let Some(qrels) = args.qrels {
        config.qrels = Some(qrels);
    }
    if let Some(out) = args.out {
        config.output_dir = Some(out);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(norm) = args.normalization {
        config.fusion.normalization = norm;
    }
    config.propagate_seed();

    let missing = |what: &str| Error::InvalidConfig(format!("pipeline needs {what}"));
    let corpus_path = config.corpus.clone().ok_or_else(|| missing("paths.corpus"))?;
    let topics_path = config.topics.clone().ok_or_else(|| missing("paths.topics"))?;
    let qrels_path = config.qrels.clone().ok_or_else(|| missing("paths.qrels"))?;
    let out_dir = config
        .output_dir
        .clone()
        .ok_or_else(|| missing("paths.output_dir"))?;

    // All inputs are validated before any stage runs.
    require_exists(&corpus_path)?;
    require_exists(&topics_path)?;
    require_exists(&qrels_path)?;
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io {
        path: out_dir.clone(),
        source: e,
    })?;

    // Config echo: the file verbatim when one was given, the canonical dump
    // otherwise.
    let echo_text = echo.unwrap_or_else(|| config.render());
    std::fs::write(out_dir.join("config.echo.conf"), &echo_text).map_err(|e| Error::Io {
        path: out_dir.join("config.echo.conf"),
        source: e,
    })?;

    // Stage 1: corpus and sparse index.
    let load = read_corpus(
        &corpus_path,
        LoadOptions {
            on_malformed: config.on_malformed,
        },
    )?;
    report_skipped(&corpus_path, &load.skipped);
    println!("[1/7] corpus: {} documents", load.documents.len());
    let index = build_index(&load.documents, Analyzer::new(config.fields))?;
    index.save(&out_dir.join("sparse.idx"))?;

    // Stage 2: term-matching runs.
    let topics = trawl_core::corpus::load_topics(&topics_path)?;
    let bm25_results: Vec<Vec<ScoredHit>> =
        par::map_ref_collect(&topics, |t| search_bm25(&index, t, config.sparse_k));
    let mut bm25_run = Run::new("bm25");
    for (topic, hits) in topics.iter().zip(bm25_results) {
        bm25_run.insert_hits(topic.id.clone(), hits);
    }
    write_run(&bm25_run, &out_dir.join("run.bm25.txt"))?;

    let rm3_results: Vec<Result<Vec<ScoredHit>>> = par::map_ref_collect(&topics, |t| {
        search_bm25_rm3(&index, t, config.sparse_k, &config.rm3)
    });
    let mut rm3_run = Run::new("bm25rm3");
    for (topic, hits) in topics.iter().zip(rm3_results) {
        rm3_run.insert_hits(topic.id.clone(), hits?);
    }
    write_run(&rm3_run, &out_dir.join("run.bm25rm3.txt"))?;
    println!("[2/7] term runs: bm25, bm25rm3 over {} topics", topics.len());

    // The written run files are the stage interface: read them back so every
    // downstream number matches what the standalone subcommands would compute
    // from the same artifacts (scores carry six decimals on disk).
    let bm25_run = parse_run(&out_dir.join("run.bm25.txt"))?;
    let rm3_run = parse_run(&out_dir.join("run.bm25rm3.txt"))?;

    // Stage 3: segment embeddings.
    let encoder = HashingEncoder::new(
        config.dense_dim,
        config.language.clone().unwrap_or_else(|| index.language().to_string()),
    );
    let per_doc: Vec<Result<Vec<(Segment, EmbeddingVector)>>> =
        par::map_ref_collect(&load.documents, |doc| {
            let segments = segment_document(doc, config.window, config.stride)?;
            segments
                .into_iter()
                .map(|seg| {
                    let vector = encoder.embed_passage(&seg)?;
                    Ok((seg, vector))
                })
                .collect()
        });
    let mut vectors = Vec::new();
    let mut parent_map = std::collections::HashMap::new();
    let mut parent_rows: Vec<(String, String)> = Vec::new();
    for result in per_doc {
        for (segment, vector) in result? {
            parent_map.insert(segment.segment_id.clone(), segment.parent_doc_id.clone());
            parent_rows.push((segment.segment_id, segment.parent_doc_id));
            vectors.push(vector);
        }
    }
    write_vectors_binary(&out_dir.join("vectors.bin"), &vectors)?;
    super::embed::write_parents_tsv(&out_dir.join("vectors.bin.parents.tsv"), &parent_rows)?;

    let query_vectors: Vec<EmbeddingVector> = topics
        .iter()
        .map(|t| encoder.embed_query(t))
        .collect::<Result<_>>()?;
    write_vectors_binary(&out_dir.join("queries.bin"), &query_vectors)?;
    println!("[3/7] embeddings: {} segments, {} queries (d={})", vectors.len(), query_vectors.len(), config.dense_dim);

    // Stage 4: dense index and run.
    let dense_index = build_dense_index(&vectors, &parent_map)?;
    dense_index.save(&out_dir.join("dense.idx"))?;
    let mut sorted_queries: Vec<&EmbeddingVector> = query_vectors.iter().collect();
    sorted_queries.sort_by(|a, b| a.id.cmp(&b.id));
    let dense_results: Vec<Result<Vec<ScoredHit>>> =
        par::map_ref_collect(&sorted_queries, |q| {
            let segments = dense_index.search(q, config.dense_depth)?;
            dense_index.aggregate(&segments, config.aggregate_m)
        });
    let mut dense_run = Run::new("dense");
    for (query, hits) in sorted_queries.iter().zip(dense_results) {
        dense_run.insert_hits(query.id.clone(), hits?);
    }
    write_run(&dense_run, &out_dir.join("run.dense.txt"))?;
    let dense_run = parse_run(&out_dir.join("run.dense.txt"))?;
    println!("[4/7] dense run over {} segments", dense_index.len());

    // Stage 5: term baseline selection.
    let qrels = parse_qrels(&qrels_path)?;
    let bm25_report = evaluate_run(&bm25_run, &qrels);
    let rm3_report = evaluate_run(&rm3_run, &qrels);
    let baseline_tag = pick_term_baseline(&bm25_report, &rm3_report).to_string();
    let baseline_run = if baseline_tag == rm3_run.tag {
        &rm3_run
    } else {
        &bm25_run
    };
    println!(
        "[5/7] term baseline: {} (P@20 {:.4} vs {:.4})",
        baseline_tag, bm25_report.mean_p20, rm3_report.mean_p20
    );

    // Stage 6: cross-validated fusion of the baseline with the dense run.
    let cv = cross_validate_alpha(&topics, &qrels, baseline_run, &dense_run, &config.fusion)?;
    write_cv_report(&cv, &out_dir.join("cv_report.jsonl"))?;
    let fused = fuse(
        baseline_run,
        &dense_run,
        &config.fusion.with_alpha(cv.global_alpha),
    )?;
    let fused_run = fused.into_run("fused");
    write_run(&fused_run, &out_dir.join("run.fused.txt"))?;
    println!(
        "[6/7] fusion: global alpha {:.2}, pooled {} {:.4}",
        cv.global_alpha,
        config.fusion.objective.as_str(),
        match config.fusion.objective {
            trawl_core::fusion::Objective::Ap => cv.pooled_ap,
            trawl_core::fusion::Objective::P20 => cv.pooled_p20,
            trawl_core::fusion::Objective::Ndcg20 => cv.pooled_ndcg20,
        }
    );

    // Stage 7: evaluation reports and significance against both baselines.
    // Per-topic details go to the eval.*.jsonl files; stdout gets the
    // summary table below.
    let dense_report = evaluate_run(&dense_run, &qrels);
    let fused_report = evaluate_run(&fused_run, &qrels);
    for (report, name) in [
        (&bm25_report, "bm25"),
        (&rm3_report, "bm25rm3"),
        (&dense_report, "dense"),
        (&fused_report, "fused"),
    ] {
        write_metric_report_jsonl(report, &out_dir.join(format!("eval.{name}.jsonl")))?;
    }

    let mut sig_lines = Vec::new();
    for (baseline, run) in [("bm25", &bm25_run), ("bm25rm3", &rm3_run)] {
        let (n, fused_scores, base_scores) = super::evaluate::paired_scores(
            &fused_run,
            run,
            &qrels,
            config.fusion.objective,
        );
        let p = paired_randomization_test(
            &fused_scores,
            &base_scores,
            config.sigtest_iterations,
            config.seed,
        )?;
        println!(
            "[7/7] sigtest fused vs {baseline}: p = {p:.6} over {n} topics{}",
            if p < 0.05 { " (significant at 0.05)" } else { "" }
        );
        sig_lines.push(serde_json::json!({
            "kind": "sigtest",
            "metric": config.fusion.objective.as_str(),
            "topics": n,
            "tag_a": "fused",
            "tag_b": baseline,
            "p_value": p,
        }));
    }
    let sig_text: String = sig_lines.iter().map(|l| format!("{l}\n")).collect();
    std::fs::write(out_dir.join("sigtest.jsonl"), sig_text).map_err(|e| Error::Io {
        path: out_dir.join("sigtest.jsonl"),
        source: e,
    })?;

    // Top-level manifest.
    let mut manifest = Manifest::new("pipeline");
    manifest.set("manifest.seed", config.seed);
    manifest.input("corpus", &corpus_path)?;
    manifest.input("topics", &topics_path)?;
    manifest.input("qrels", &qrels_path)?;
    manifest.set("config.fields", config.fields.as_str());
    manifest.set("config.sparse_k", config.sparse_k);
    manifest.set("config.dense_dim", config.dense_dim);
    manifest.set("config.dense_depth", config.dense_depth);
    manifest.set("config.aggregate_m", config.aggregate_m);
    manifest.set(
        "config.normalization",
        config.fusion.normalization.as_str(),
    );
    manifest.set("config.folds", config.fusion.folds);
    manifest.set("config.objective", config.fusion.objective.as_str());
    manifest.set("output.documents", load.documents.len());
    manifest.set("output.segments", dense_index.len());
    manifest.set("output.term_baseline", &baseline_tag);
    manifest.set("output.selected_alpha", cv.global_alpha);
    manifest.set("output.fused_mean_p20", fused_report.mean_p20);
    manifest.set("output.baseline_mean_p20", if baseline_tag == "bm25rm3" {
        rm3_report.mean_p20
    } else {
        bm25_report.mean_p20
    });
    manifest.write(&out_dir.join("manifest.txt"))?;

    summary(&out_dir, &[&bm25_report, &rm3_report, &dense_report, &fused_report]);
    Ok(())
}

fn summary(out_dir: &Path, reports: &[&MetricReport]) {
    println!();
    println!("{:<10} {:>8} {:>8} {:>8}", "run", "ap", "p20", "ndcg20");
    for report in reports {
        println!(
            "{:<10} {:>8.4} {:>8.4} {:>8.4}",
            report.tag, report.mean_ap, report.mean_p20, report.mean_ndcg20
        );
    }
    println!("artifacts in {}", out_dir.display());
}
