//! Metric report rendering: human-readable tables for stdout and
//! line-delimited records for scripts.

use std::io::Write;
use std::path::Path;

use serde_json::json;

use trawl_core::eval::MetricReport;
use trawl_core::{Error, Result};

/// Fixed-width per-topic table with a trailing mean row.
pub fn render_metric_table(report: &MetricReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "run tag: {} ({} topics evaluated)\n",
        report.tag, report.evaluated_topics
    ));
    out.push_str(&format!(
        "{:<16} {:>8} {:>8} {:>8}\n",
        "topic", "ap", "p20", "ndcg20"
    ));
    for (topic, m) in &report.per_topic {
        out.push_str(&format!(
            "{topic:<16} {:>8.4} {:>8.4} {:>8.4}\n",
            m.ap, m.p20, m.ndcg20
        ));
    }
    out.push_str(&format!(
        "{:<16} {:>8.4} {:>8.4} {:>8.4}\n",
        "mean", report.mean_ap, report.mean_p20, report.mean_ndcg20
    ));
    out
}

/// One `topic` line per topic plus a trailing `mean` line.
pub fn write_metric_report_jsonl(report: &MetricReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    for (topic, m) in &report.per_topic {
        let line = json!({
            "kind": "topic",
            "topic": topic,
            "ap": m.ap,
            "p20": m.p20,
            "ndcg20": m.ndcg20,
        });
        writeln!(w, "{line}").map_err(io)?;
    }
    let mean = json!({
        "kind": "mean",
        "tag": report.tag,
        "topics": report.evaluated_topics,
        "ap": report.mean_ap,
        "p20": report.mean_p20,
        "ndcg20": report.mean_ndcg20,
    });
    writeln!(w, "{mean}").map_err(io)?;
    w.flush().map_err(io)
}
