//! Fixture generators shared by the integration and acceptance suites.
//!
//! Everything is seeded through SplitMix64, so fixtures are byte-identical
//! across runs and platforms.

// Each test target compiles this module separately and none uses all of it.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use trawl_core::corpus::Document;
use trawl_core::rng::SplitMix64;

pub struct Fixture {
    pub corpus: PathBuf,
    pub topics: PathBuf,
    pub qrels: PathBuf,
}

/// The hand-checked metric fixture: 5 topics over a 30-doc universe with
/// graded judgments. Returns (run path, qrels path).
///
/// Expected values, computed by hand from the metric definitions:
///
/// | topic | AP        | P@20 | nDCG@20              |
/// |-------|-----------|------|----------------------|
/// | t1    | 1.0       | 0.15 | 1.0                  |
/// | t2    | 0.5       | 0.05 | 0.6309297535714574   |
/// | t3    | 0.8333... | 0.10 | 0.9197207891481877   |
/// | t4    | 1.0       | 0.15 | 0.8174935137996168   |
/// | t5    | 0.0       | 0.00 | 0.0                  |
pub fn metric_oracle_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let run_path = dir.join("oracle_run.txt");
    let qrels_path = dir.join("oracle_qrels.txt");

    let mut run = String::new();
    let mut add = |topic: &str, docs: &[&str]| {
        for (i, doc) in docs.iter().enumerate() {
            writeln!(
                run,
                "{topic} Q0 {doc} {} {:.6} oracle",
                i + 1,
                100.0 - i as f64
            )
            .unwrap();
        }
    };
    // t1: three relevant docs at ranks 1..3 of 10.
    add(
        "t1",
        &["d01", "d02", "d03", "d04", "d05", "d06", "d07", "d08", "d09", "d10"],
    );
    // t2: single relevant doc at rank 2.
    add("t2", &["d04", "d05"]);
    // t3: the worked example, relevant at ranks 1 and 3 of 3.
    add("t3", &["d07", "d08", "d09"]);
    // t4: graded judgments ranked 1,3,2 by grade.
    add("t4", &["d12", "d10", "d11", "d13"]);
    // t5: judged relevant doc never retrieved.
    add("t5", &["d21", "d22", "d23"]);

    let qrels = "\
t1 0 d01 1
t1 0 d02 1
t1 0 d03 1
t1 0 d04 0
t2 0 d05 1
t2 0 d04 0
t3 0 d07 1
t3 0 d08 0
t3 0 d09 1
t4 0 d10 3
t4 0 d11 2
t4 0 d12 1
t4 0 d13 0
t5 0 d20 1
t5 0 d21 0
";
    std::fs::write(&run_path, run).unwrap();
    std::fs::write(&qrels_path, qrels).unwrap();
    (run_path, qrels_path)
}

pub const ORACLE_AP: [f64; 5] = [1.0, 0.5, 0.8333333333333333, 1.0, 0.0];
pub const ORACLE_P20: [f64; 5] = [0.15, 0.05, 0.10, 0.15, 0.0];
pub const ORACLE_NDCG: [f64; 5] = [
    1.0,
    0.6309297535714574,
    0.9197207891481877,
    0.8174935137996168,
    0.0,
];
pub const ORACLE_MEAN_AP: f64 = 0.6666666666666666;
pub const ORACLE_MEAN_P20: f64 = 0.09;
pub const ORACLE_MEAN_NDCG: f64 = 0.6736288113038523;

/// Topical-cluster corpus for the end-to-end criterion: 40 topics of 15
/// relevant documents each plus noise fillers (2000 docs total). Term
/// overlap is deliberately noisy: each query carries two rare "poison"
/// tokens planted in 20 non-relevant documents, which BM25's idf rewards
/// far beyond their worth, while the hashing encoder's normalized window
/// vectors barely notice them.
pub fn cluster_corpus(dir: &Path, seed: u64) -> Fixture {
    const N_TOPICS: usize = 40;
    const REL_PER: usize = 15;
    const VOCAB_N: u64 = 16;
    const NOISE_N: u64 = 80;
    const SENTENCES: usize = 15;
    const POISON_DOCS: usize = 20;

    let mut rng = SplitMix64::new(seed);
    let noise_token = |i: u64| format!("noise{i:02}");
    let topic_token = |t: usize, i: u64| format!("t{t:02}w{i:02}");

    // Relevant docs: every sentence half topical, half noise.
    let mut sentences_of: std::collections::BTreeMap<String, Vec<String>> = Default::default();
    let mut relevant_ids: Vec<Vec<String>> = Vec::new();
    for t in 0..N_TOPICS {
        let mut ids = Vec::new();
        for d in 0..REL_PER {
            let id = format!("t{t:02}r{d:02}");
            let sentences = (0..SENTENCES)
                .map(|_| {
                    let mut tokens: Vec<String> = Vec::with_capacity(6);
                    for _ in 0..3 {
                        tokens.push(topic_token(t, rng.next_below(VOCAB_N)));
                    }
                    for _ in 0..3 {
                        tokens.push(noise_token(rng.next_below(NOISE_N)));
                    }
                    rng.shuffle(&mut tokens);
                    format!("{}.", tokens.join(" "))
                })
                .collect();
            sentences_of.insert(id.clone(), sentences);
            ids.push(id);
        }
        relevant_ids.push(ids);
    }
    let fillers = 2000 - N_TOPICS * REL_PER;
    for f in 0..fillers {
        let id = format!("fill{f:04}");
        let sentences = (0..SENTENCES)
            .map(|_| {
                let tokens: Vec<String> =
                    (0..6).map(|_| noise_token(rng.next_below(NOISE_N))).collect();
                format!("{}.", tokens.join(" "))
            })
            .collect();
        sentences_of.insert(id, sentences);
    }

    let all_ids: Vec<String> = sentences_of.keys().cloned().collect();
    let mut topics_lines = String::new();
    let mut qrels_lines = String::new();
    for (t, topic_relevant) in relevant_ids.iter().enumerate() {
        let topic_id = format!("q{t:03}");
        // Query: 3 distinct topic tokens, 1 noise token, 2 poison tokens.
        let mut q_indices: Vec<u64> = (0..VOCAB_N).collect();
        rng.shuffle(&mut q_indices);
        let mut query: Vec<String> = q_indices[..3]
            .iter()
            .map(|&i| topic_token(t, i))
            .collect();
        query.push(noise_token(rng.next_below(NOISE_N)));

        // Plant each poison token twice in 20 non-relevant docs, the two
        // occurrences at least five sentences apart so no single window
        // accumulates them.
        let foreign: Vec<&String> = all_ids
            .iter()
            .filter(|id| !id.starts_with(&format!("t{t:02}r")))
            .collect();
        let victim_indices = rng.sample_indices(foreign.len(), POISON_DOCS);
        for p in 0..2 {
            let poison = format!("px{topic_id}n{p}");
            query.push(poison.clone());
            for &v in &victim_indices {
                let doc = sentences_of.get_mut(foreign[v].as_str()).unwrap();
                let first = rng.next_below(5) as usize;
                let second = first + 5 + rng.next_below((SENTENCES - first - 5) as u64) as usize;
                for slot in [first, second] {
                    let sentence = &mut doc[slot];
                    sentence.truncate(sentence.len() - 1);
                    sentence.push_str(&format!(" {poison}."));
                }
            }
        }
        writeln!(
            topics_lines,
            "{}",
            serde_json::json!({ "id": topic_id, "text": query.join(" ") })
        )
        .unwrap();
        for id in topic_relevant {
            writeln!(qrels_lines, "{topic_id} 0 {id} 1").unwrap();
        }
    }

    let mut corpus_lines = String::new();
    for (id, sentences) in &sentences_of {
        writeln!(
            corpus_lines,
            "{}",
            serde_json::json!({
                "id": id,
                "title": "",
                "text": sentences.join(" "),
                "language": "en",
            })
        )
        .unwrap();
    }

    let fixture = Fixture {
        corpus: dir.join("corpus.jsonl"),
        topics: dir.join("topics.jsonl"),
        qrels: dir.join("qrels.txt"),
    };
    std::fs::write(&fixture.corpus, corpus_lines).unwrap();
    std::fs::write(&fixture.topics, topics_lines).unwrap();
    std::fs::write(&fixture.qrels, qrels_lines).unwrap();
    fixture
}

/// Smaller variant of [`cluster_corpus`] for fast CLI-behavior tests:
/// 8 topics, 10 relevant docs each, 400 docs total.
pub fn small_cluster_corpus(dir: &Path, seed: u64) -> Fixture {
    let mut rng = SplitMix64::new(seed);
    let mut corpus_lines = String::new();
    let mut topics_lines = String::new();
    let mut qrels_lines = String::new();
    let noise_token = |i: u64| format!("noise{i:02}");

    let mut ids_and_text: Vec<(String, String)> = Vec::new();
    for t in 0..8 {
        for d in 0..10 {
            let id = format!("t{t}r{d:02}");
            let sentences: Vec<String> = (0..8)
                .map(|_| {
                    format!(
                        "t{t}w{} t{t}w{} {} {}.",
                        rng.next_below(8),
                        rng.next_below(8),
                        noise_token(rng.next_below(30)),
                        noise_token(rng.next_below(30)),
                    )
                })
                .collect();
            ids_and_text.push((id, sentences.join(" ")));
        }
    }
    for f in 0..320 {
        let id = format!("fill{f:03}");
        let sentences: Vec<String> = (0..8)
            .map(|_| {
                format!(
                    "{} {} {} {}.",
                    noise_token(rng.next_below(30)),
                    noise_token(rng.next_below(30)),
                    noise_token(rng.next_below(30)),
                    noise_token(rng.next_below(30)),
                )
            })
            .collect();
        ids_and_text.push((id, sentences.join(" ")));
    }
    ids_and_text.sort();
    for (id, text) in &ids_and_text {
        writeln!(
            corpus_lines,
            "{}",
            serde_json::json!({ "id": id, "title": "", "text": text, "language": "en" })
        )
        .unwrap();
    }
    for t in 0..8 {
        let topic_id = format!("q{t:02}");
        writeln!(
            topics_lines,
            "{}",
            serde_json::json!({
                "id": topic_id,
                "text": format!("t{t}w{} t{t}w{} {}", rng.next_below(8), rng.next_below(8),
                                noise_token(rng.next_below(30))),
            })
        )
        .unwrap();
        for d in 0..10 {
            writeln!(qrels_lines, "{topic_id} 0 t{t}r{d:02} 1").unwrap();
        }
    }

    let fixture = Fixture {
        corpus: dir.join("corpus.jsonl"),
        topics: dir.join("topics.jsonl"),
        qrels: dir.join("qrels.txt"),
    };
    std::fs::write(&fixture.corpus, corpus_lines).unwrap();
    std::fs::write(&fixture.topics, topics_lines).unwrap();
    std::fs::write(&fixture.qrels, qrels_lines).unwrap();
    fixture
}

/// Synthetic article collection for the weak-supervision criterion:
/// `n_regular` articles whose two-token titles occur in their own bodies,
/// plus `n_ghost` articles whose title tokens occur in no body anywhere.
pub fn wiki_articles(n_regular: usize, n_ghost: usize, seed: u64) -> Vec<Document> {
    let mut rng = SplitMix64::new(seed);
    let mut articles = Vec::with_capacity(n_regular + n_ghost);
    for a in 0..n_regular {
        let subject = format!("subject{a:04}");
        let theme = format!("theme{a:04}");
        let mut body_tokens: Vec<String> = Vec::new();
        for _ in 0..3 {
            body_tokens.push(subject.clone());
            body_tokens.push(theme.clone());
        }
        for _ in 0..34 {
            body_tokens.push(format!("filler{:02}", rng.next_below(50)));
        }
        rng.shuffle(&mut body_tokens);
        articles.push(Document {
            id: format!("art{a:04}"),
            title: format!("{subject} {theme}"),
            text: body_tokens.join(" "),
            language: "en".to_string(),
        });
    }
    for g in 0..n_ghost {
        let body: Vec<String> = (0..40)
            .map(|_| format!("filler{:02}", rng.next_below(50)))
            .collect();
        articles.push(Document {
            id: format!("ghost{g:04}"),
            title: format!("ghostword{g:04}a ghostword{g:04}b"),
            text: body.join(" "),
            language: "en".to_string(),
        });
    }
    articles
}

/// Write documents as a corpus file.
pub fn write_corpus_file(path: &Path, docs: &[Document]) {
    let mut lines = String::new();
    for doc in docs {
        writeln!(lines, "{}", serde_json::to_string(doc).unwrap()).unwrap();
    }
    std::fs::write(path, lines).unwrap();
}

/// Path of the compiled `trawl` binary.
pub fn trawl_bin() -> &'static str {
    env!("CARGO_BIN_EXE_trawl")
}

/// Run the binary, asserting success; returns stdout.
pub fn run_trawl(args: &[&str]) -> String {
    let output = std::process::Command::new(trawl_bin())
        .args(args)
        .output()
        .expect("failed to spawn trawl");
    assert!(
        output.status.success(),
        "trawl {:?} failed:\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Run the binary expecting failure; returns (exit code, stderr).
pub fn run_trawl_err(args: &[&str]) -> (i32, String) {
    let output = std::process::Command::new(trawl_bin())
        .args(args)
        .output()
        .expect("failed to spawn trawl");
    assert!(!output.status.success(), "trawl {args:?} unexpectedly succeeded");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

/// Parse a `key = value` manifest/config file.
pub fn parse_flat_kv(path: &Path) -> std::collections::BTreeMap<String, String> {
    std::fs::read_to_string(path)
        .unwrap_or_else(|_| panic!("missing flat file {}", path.display()))
        .lines()
        .filter_map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}
