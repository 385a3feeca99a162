//! Experiment configuration: a flat key-value text format with section
//! prefixes (`fusion.folds = 5`), `#` comments, and blank lines. Flags
//! override file values; unknown keys abort so typos cannot silently fall
//! back to defaults.

use std::path::{Path, PathBuf};

use trawl_core::corpus::{FieldPolicy, MalformedPolicy};
use trawl_core::fusion::{FusionConfig, Objective, ScoreNormalization};
use trawl_core::sparse::Rm3Params;
use trawl_core::weaksup::{NegativeSampling, SynthesisConfig};
use trawl_core::{Error, Result};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub corpus: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,

    /// Query-analysis language override; empty uses the corpus language.
    pub language: Option<String>,
    pub fields: FieldPolicy,
    pub on_malformed: MalformedPolicy,

    pub sparse_k: usize,
    pub rm3: Rm3Params,

    pub dense_dim: usize,
    pub window: usize,
    pub stride: usize,
    pub dense_depth: usize,
    pub aggregate_m: usize,

    pub fusion: FusionConfig,
    pub synthesis: SynthesisConfig,
    pub sigtest_iterations: u64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            topics: None,
            qrels: None,
            output_dir: None,
            language: None,
            fields: FieldPolicy::default(),
            on_malformed: MalformedPolicy::default(),
            sparse_k: 1000,
            rm3: Rm3Params::default(),
            dense_dim: 256,
            window: 5,
            stride: 1,
            dense_depth: 100,
            aggregate_m: 3,
            fusion: FusionConfig::default(),
            synthesis: SynthesisConfig::default(),
            sigtest_iterations: 100_000,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Apply `seed` everywhere a stage draws randomness.
    pub fn propagate_seed(&mut self) {
        self.fusion.seed = self.seed;
        self.synthesis.seed = self.seed;
    }

    /// Canonical flat dump, used as the config echo when the experiment was
    /// assembled from flags without a file.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        line("paths.corpus", path(&self.corpus));
        line("paths.topics", path(&self.topics));
        line("paths.qrels", path(&self.qrels));
        line("paths.output_dir", path(&self.output_dir));
        line("corpus.language", self.language.clone().unwrap_or_default());
        line("analyzer.fields", self.fields.as_str().to_string());
        line(
            "corpus.on_malformed",
            match self.on_malformed {
                MalformedPolicy::Abort => "abort".to_string(),
                MalformedPolicy::Skip => "skip".to_string(),
            },
        );
        line("sparse.k", self.sparse_k.to_string());
        line("rm3.fb_docs", self.rm3.fb_docs.to_string());
        line("rm3.fb_terms", self.rm3.fb_terms.to_string());
        line("rm3.orig_weight", self.rm3.orig_weight.to_string());
        line("dense.dim", self.dense_dim.to_string());
        line("dense.window", self.window.to_string());
        line("dense.stride", self.stride.to_string());
        line("dense.depth", self.dense_depth.to_string());
        line("dense.m", self.aggregate_m.to_string());
        line("fusion.alpha", self.fusion.alpha.to_string());
        line("fusion.normalization", self.fusion.normalization.as_str().to_string());
        line(
            "fusion.grid",
            self.fusion
                .alpha_grid
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        line("fusion.folds", self.fusion.folds.to_string());
        line("fusion.objective", self.fusion.objective.as_str().to_string());
        line("synthesis.k", self.synthesis.k.to_string());
        line(
            "synthesis.negatives",
            self.synthesis.negatives_per_example.to_string(),
        );
        line(
            "synthesis.sampling",
            match self.synthesis.negative_sampling {
                NegativeSampling::Top => "top".to_string(),
                NegativeSampling::RandomFromRetrieved => "random-from-retrieved".to_string(),
            },
        );
        line(
            "synthesis.min_title_tokens",
            self.synthesis.min_title_tokens.to_string(),
        );
        line(
            "synthesis.min_body_tokens",
            self.synthesis.min_body_tokens.to_string(),
        );
        line("sigtest.iterations", self.sigtest_iterations.to_string());
        line("seed", self.seed.to_string());
        out
    }
}

/// Parse a config file over defaults. Returns the config and the raw file
/// bytes for verbatim echoing.
pub fn load_config_file(path: &Path) -> Result<(ExperimentConfig, String)> {
    if !path.exists() {
        return Err(Error::MissingInput {
            path: path.to_path_buf(),
        });
    }
    let raw = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut config = ExperimentConfig::default();
    for (i, line) in raw.lines().enumerate() {
        let line_no = i as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            line: line_no,
            message: "expected `key = value`".to_string(),
        })?;
        apply_kv(&mut config, key.trim(), value.trim()).map_err(|message| Error::Format {
            path: path.to_path_buf(),
            line: line_no,
            message,
        })?;
    }
    config.propagate_seed();
    Ok((config, raw))
}

fn apply_kv(
    config: &mut ExperimentConfig,
    key: &str,
    value: &str,
) -> std::result::Result<(), String> {
    fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
        value
            .parse()
            .map_err(|_| format!("bad value {value:?} for {key}"))
    }

    match key {
        "paths.corpus" => config.corpus = Some(PathBuf::from(value)),
        "paths.topics" => config.topics = Some(PathBuf::from(value)),
        "paths.qrels" => config.qrels = Some(PathBuf::from(value)),
        "paths.output_dir" => config.output_dir = Some(PathBuf::from(value)),
        "corpus.language" => config.language = Some(value.to_string()),
        "corpus.on_malformed" => {
            config.on_malformed = match value {
                "abort" => MalformedPolicy::Abort,
                "skip" => MalformedPolicy::Skip,
                _ => return Err(format!("bad value {value:?} for {key}")),
            }
        }
        "analyzer.fields" => {
            config.fields =
                FieldPolicy::parse(value).ok_or_else(|| format!("bad value {value:?} for {key}"))?
        }
        "sparse.k" => config.sparse_k = num(key, value)?,
        "rm3.fb_docs" => config.rm3.fb_docs = num(key, value)?,
        "rm3.fb_terms" => config.rm3.fb_terms = num(key, value)?,
        "rm3.orig_weight" => config.rm3.orig_weight = num(key, value)?,
        "dense.dim" => config.dense_dim = num(key, value)?,
        "dense.window" => config.window = num(key, value)?,
        "dense.stride" => config.stride = num(key, value)?,
        "dense.depth" => config.dense_depth = num(key, value)?,
        "dense.m" => config.aggregate_m = num(key, value)?,
        "fusion.alpha" => config.fusion.alpha = num(key, value)?,
        "fusion.normalization" => {
            config.fusion.normalization = ScoreNormalization::parse(value)
                .ok_or_else(|| format!("bad value {value:?} for {key}"))?
        }
        "fusion.grid" => config.fusion.alpha_grid = parse_grid(value)?,
        "fusion.folds" => config.fusion.folds = num(key, value)?,
        "fusion.objective" => {
            config.fusion.objective = Objective::parse(value)
                .ok_or_else(|| format!("bad value {value:?} for {key}"))?
        }
        "fusion.output_depth" => config.fusion.output_depth = Some(num(key, value)?),
        "synthesis.k" => config.synthesis.k = num(key, value)?,
        "synthesis.negatives" => config.synthesis.negatives_per_example = num(key, value)?,
        "synthesis.sampling" => {
            config.synthesis.negative_sampling = NegativeSampling::parse(value)
                .ok_or_else(|| format!("bad value {value:?} for {key}"))?
        }
        "synthesis.min_title_tokens" => config.synthesis.min_title_tokens = num(key, value)?,
        "synthesis.min_body_tokens" => config.synthesis.min_body_tokens = num(key, value)?,
        "sigtest.iterations" => config.sigtest_iterations = num(key, value)?,
        "seed" => config.seed = num(key, value)?,
        _ => return Err(format!("unknown config key {key:?}")),
    }
    Ok(())
}

/// Comma-separated alpha grid, e.g. `0.0,0.25,0.5,0.75,1.0`.
pub fn parse_grid(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad grid value {t:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults_and_echo_is_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        let content = "\
# comment line
paths.corpus = data/corpus.jsonl
fusion.folds = 3
fusion.grid = 0.0,0.5,1.0
dense.m = 2
seed = 9
";
        std::fs::write(&path, content).unwrap();
        let (config, raw) = load_config_file(&path).unwrap();
        assert_eq!(raw, content);
        assert_eq!(config.corpus.unwrap(), PathBuf::from("data/corpus.jsonl"));
        assert_eq!(config.fusion.folds, 3);
        assert_eq!(config.fusion.alpha_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(config.aggregate_m, 2);
        assert_eq!(config.seed, 9);
        assert_eq!(config.fusion.seed, 9, "seed propagates to fusion");
    }

    #[test]
    fn unknown_key_rejected_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        std::fs::write(&path, "seed = 1\nfusion.bogus = 2\n").unwrap();
        match load_config_file(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn render_round_trips_through_parse() {
        let mut config = ExperimentConfig {
            corpus: Some(PathBuf::from("c.jsonl")),
            seed: 5,
            ..Default::default()
        };
        config.propagate_seed();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        std::fs::write(&path, config.render()).unwrap();
        let (parsed, _) = load_config_file(&path).unwrap();
        assert_eq!(parsed.render(), config.render());
    }
}
