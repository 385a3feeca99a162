pub mod embed;
pub mod evaluate;
pub mod fuse;
pub mod index;
pub mod pipeline;
pub mod search;
pub mod synthesize;

use std::path::Path;

use trawl_core::corpus::{FieldPolicy, MalformedPolicy};
use trawl_core::dense::VectorFileFormat;
use trawl_core::fusion::{Objective, ScoreNormalization};
use trawl_core::weaksup::NegativeSampling;
use trawl_core::{Error, Result};

// clap value parsers; bad values surface as usage errors.

pub fn parse_fields(s: &str) -> std::result::Result<FieldPolicy, String> {
    FieldPolicy::parse(s).ok_or_else(|| format!("expected title-and-text or text, got {s:?}"))
}

pub fn parse_malformed(s: &str) -> std::result::Result<MalformedPolicy, String> {
    match s {
        "abort" => Ok(MalformedPolicy::Abort),
        "skip" => Ok(MalformedPolicy::Skip),
        _ => Err(format!("expected abort or skip, got {s:?}")),
    }
}

pub fn parse_normalization(s: &str) -> std::result::Result<ScoreNormalization, String> {
    ScoreNormalization::parse(s).ok_or_else(|| format!("expected none or minmax, got {s:?}"))
}

pub fn parse_objective(s: &str) -> std::result::Result<Objective, String> {
    Objective::parse(s).ok_or_else(|| format!("expected ap, p20 or ndcg20, got {s:?}"))
}

pub fn parse_sampling(s: &str) -> std::result::Result<NegativeSampling, String> {
    NegativeSampling::parse(s)
        .ok_or_else(|| format!("expected top or random-from-retrieved, got {s:?}"))
}

pub fn parse_format(s: &str) -> std::result::Result<VectorFileFormat, String> {
    VectorFileFormat::parse(s).ok_or_else(|| format!("expected binary or text, got {s:?}"))
}

/// Check an input path exists before a stage starts.
pub fn require_exists(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingInput {
            path: path.to_path_buf(),
        })
    }
}

/// Print corpus-loader skip warnings.
pub fn report_skipped(path: &Path, skipped: &[(u64, String)]) {
    for (line, message) in skipped {
        eprintln!("warning: {}:{line}: {message} (record skipped)", path.display());
    }
}
