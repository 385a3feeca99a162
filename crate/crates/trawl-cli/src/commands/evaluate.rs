//! `evaluate` and `sigtest`.

use std::path::PathBuf;

use clap::Args;

use trawl_core::eval::{
    evaluate_run, paired_randomization_test, parse_qrels, parse_run, topic_metrics, Qrels, Run,
};
use trawl_core::fusion::Objective;
use trawl_core::Result;

use crate::commands::parse_objective;
use crate::manifest::Manifest;
use crate::report::{render_metric_table, write_metric_report_jsonl};

#[derive(Args)]
pub struct EvaluateArgs {
    /// TREC run file.
    #[arg(long)]
    pub run: PathBuf,
    /// TREC qrels file.
    #[arg(long)]
    pub qrels: PathBuf,
    /// Also write the report as line-delimited records.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let run = parse_run(&args.run)?;
    let qrels = parse_qrels(&args.qrels)?;
    let report = evaluate_run(&run, &qrels);
    print!("{}", render_metric_table(&report));

    if let Some(path) = &args.report {
        write_metric_report_jsonl(&report, path)?;
        let mut manifest = Manifest::new("evaluate");
        manifest.input("run", &args.run)?;
        manifest.input("qrels", &args.qrels)?;
        manifest.set("output.topics", report.evaluated_topics);
        manifest.write(&manifest_path(path))?;
    }
    Ok(())
}

#[derive(Args)]
pub struct SigtestArgs {
    /// First run (system A).
    #[arg(long)]
    pub run_a: PathBuf,
    /// Second run (system B).
    #[arg(long)]
    pub run_b: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Metric compared per topic: ap, p20 or ndcg20.
    #[arg(long, default_value = "ap", value_parser = parse_objective)]
    pub metric: Objective,
    /// Monte Carlo iterations (used above the exhaustive cutoff).
    #[arg(long, default_value_t = 100_000)]
    pub iterations: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the result as a line-delimited record.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn sigtest(args: SigtestArgs) -> Result<()> {
    let run_a = parse_run(&args.run_a)?;
    let run_b = parse_run(&args.run_b)?;
    let qrels = parse_qrels(&args.qrels)?;

    let (topics, a_scores, b_scores) = paired_scores(&run_a, &run_b, &qrels, args.metric);
    let p = paired_randomization_test(&a_scores, &b_scores, args.iterations, args.seed)?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let mean_a = mean(&a_scores);
    let mean_b = mean(&b_scores);

    println!(
        "{} over {} paired topics: {} {:.4} vs {} {:.4}",
        args.metric.as_str(),
        topics,
        run_a.tag,
        mean_a,
        run_b.tag,
        mean_b
    );
    println!(
        "two-sided paired randomization p = {:.6}{}",
        p,
        if p < 0.05 { " (significant at 0.05)" } else { "" }
    );

    if let Some(path) = &args.report {
        let line = serde_json::json!({
            "kind": "sigtest",
            "metric": args.metric.as_str(),
            "topics": topics,
            "tag_a": run_a.tag,
            "mean_a": mean_a,
            "tag_b": run_b.tag,
            "mean_b": mean_b,
            "p_value": p,
        });
        std::fs::write(path, format!("{line}\n")).map_err(|e| trawl_core::Error::Io {
            path: path.clone(),
            source: e,
        })?;
        let mut manifest = Manifest::new("sigtest");
        manifest.input("run_a", &args.run_a)?;
        manifest.input("run_b", &args.run_b)?;
        manifest.input("qrels", &args.qrels)?;
        manifest.set("param.metric", args.metric.as_str());
        manifest.set("param.iterations", args.iterations);
        manifest.set("param.seed", args.seed);
        manifest.set("output.p_value", p);
        manifest.write(&manifest_path(path))?;
    }
    Ok(())
}

/// Per-topic metric vectors paired over every judged topic; a run missing a
/// topic scores as an empty ranking.
pub fn paired_scores(
    run_a: &Run,
    run_b: &Run,
    qrels: &Qrels,
    metric: Objective,
) -> (usize, Vec<f64>, Vec<f64>) {
    let mut a_scores = Vec::new();
    let mut b_scores = Vec::new();
    for topic in qrels.evaluable_topics() {
        let judgments = qrels.judgments(&topic).expect("evaluable topic is judged");
        let a = topic_metrics(run_a.ranking(&topic), judgments).expect("has relevant docs");
        let b = topic_metrics(run_b.ranking(&topic), judgments).expect("has relevant docs");
        a_scores.push(metric.of(&a));
        b_scores.push(metric.of(&b));
    }
    (a_scores.len(), a_scores, b_scores)
}

fn manifest_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.txt");
    PathBuf::from(name)
}
