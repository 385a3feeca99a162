//! `fuse` (fixed alpha) and `sweep-alpha` (cross-validated selection).

use std::path::PathBuf;

use clap::Args;

use trawl_core::corpus::Topic;
use trawl_core::eval::{parse_qrels, parse_run, write_run};
use trawl_core::fusion::{
    cross_validate_alpha, fuse, write_cv_report, FusionConfig, Objective, ScoreNormalization,
};
use trawl_core::{Error, Result};

use crate::commands::{parse_normalization, parse_objective};
use crate::manifest::Manifest;

#[derive(Args)]
pub struct FuseArgs {
    /// Sparse (term-matching) run file.
    #[arg(long)]
    pub sparse: PathBuf,
    /// Dense run file.
    #[arg(long)]
    pub dense: PathBuf,
    /// Interpolation weight of the sparse score.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value = "none", value_parser = parse_normalization)]
    pub normalization: ScoreNormalization,
    #[arg(long, default_value_t = 1000)]
    pub sparse_depth: usize,
    #[arg(long, default_value_t = 100)]
    pub dense_depth: usize,
    /// Truncate fused lists to this depth.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "fused")]
    pub tag: String,
}

pub fn fuse_runs(args: FuseArgs) -> Result<()> {
    let sparse = parse_run(&args.sparse)?;
    let dense = parse_run(&args.dense)?;
    let config = FusionConfig {
        alpha: args.alpha,
        normalization: args.normalization,
        sparse_depth: args.sparse_depth,
        dense_depth: args.dense_depth,
        output_depth: args.depth,
        ..Default::default()
    };
    let fused = fuse(&sparse, &dense, &config)?;
    let run = fused.into_run(args.tag.clone());
    write_run(&run, &args.out)?;

    let mut manifest = Manifest::new("fuse");
    manifest.input("sparse", &args.sparse)?;
    manifest.input("dense", &args.dense)?;
    manifest.set("param.alpha", args.alpha);
    manifest.set("param.normalization", args.normalization.as_str());
    manifest.set("param.sparse_depth", args.sparse_depth);
    manifest.set("param.dense_depth", args.dense_depth);
    manifest.write(&manifest_path(&args.out))?;

    println!(
        "fused {} topics at alpha {} -> {}",
        run.topics.len(),
        args.alpha,
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
pub struct SweepAlphaArgs {
    #[arg(long)]
    pub sparse: PathBuf,
    #[arg(long)]
    pub dense: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Topics file restricting the cross-validation topic set; defaults to
    /// every judged topic in the qrels.
    #[arg(long)]
    pub topics: Option<PathBuf>,
    /// Comma-separated alpha grid (default 0.0,0.1,...,1.0).
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value = "ap", value_parser = parse_objective)]
    pub objective: Objective,
    #[arg(long, default_value = "none", value_parser = parse_normalization)]
    pub normalization: ScoreNormalization,
    #[arg(long, default_value_t = 1000)]
    pub sparse_depth: usize,
    #[arg(long, default_value_t = 100)]
    pub dense_depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fold report file (line-delimited records).
    #[arg(long)]
    pub report: PathBuf,
    /// Also write the fused run at the globally selected alpha.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "fused")]
    pub tag: String,
}

pub fn sweep_alpha(args: SweepAlphaArgs) -> Result<()> {
    let sparse = parse_run(&args.sparse)?;
    let dense = parse_run(&args.dense)?;
    let qrels = parse_qrels(&args.qrels)?;

    let mut config = FusionConfig {
        normalization: args.normalization,
        sparse_depth: args.sparse_depth,
        dense_depth: args.dense_depth,
        folds: args.folds,
        objective: args.objective,
        seed: args.seed,
        ..Default::default()
    };
    if let Some(grid) = &args.grid {
        config.alpha_grid = crate::config::parse_grid(grid).map_err(Error::InvalidConfig)?;
    }

    let topics: Vec<Topic> = match &args.topics {
        Some(path) => trawl_core::corpus::load_topics(path)?,
        None => qrels
            .topics
            .keys()
            .map(|id| Topic {
                id: id.clone(),
                text: String::new(),
            })
            .collect(),
    };
    let report = cross_validate_alpha(&topics, &qrels, &sparse, &dense, &config)?;
    write_cv_report(&report, &args.report)?;

    for fold in &report.folds {
        println!(
            "fold {}: alpha {:.2}, mean test {} {:.4} ({} test topics)",
            fold.fold,
            fold.alpha,
            config.objective.as_str(),
            fold.mean_test_objective,
            fold.test_topics.len()
        );
    }
    println!(
        "pooled: ap {:.4}  p20 {:.4}  ndcg20 {:.4}",
        report.pooled_ap, report.pooled_p20, report.pooled_ndcg20
    );
    println!("selected alpha (global): {:.2}", report.global_alpha);

    let mut manifest = Manifest::new("sweep-alpha");
    manifest.input("sparse", &args.sparse)?;
    manifest.input("dense", &args.dense)?;
    manifest.input("qrels", &args.qrels)?;
    manifest.set("param.folds", args.folds);
    manifest.set("param.objective", config.objective.as_str());
    manifest.set("param.normalization", args.normalization.as_str());
    manifest.set("param.seed", args.seed);
    manifest.set("output.global_alpha", report.global_alpha);
    manifest.set("output.pooled_ap", report.pooled_ap);

    if let Some(out) = &args.out {
        let fused = fuse(&sparse, &dense, &config.with_alpha(report.global_alpha))?;
        write_run(&fused.into_run(args.tag.clone()), out)?;
        manifest.set("output.fused_run", out.display());
        println!(
            "fused run at alpha {:.2} -> {}",
            report.global_alpha,
            out.display()
        );
    }
    manifest.write(&manifest_path(&args.report))?;
    Ok(())
}

fn manifest_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.txt");
    PathBuf::from(name)
}
