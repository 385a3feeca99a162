//! TREC qrels and run file formats.
//!
//! Qrels lines: `topic 0 docid grade` (the second field is ignored).
//! Run lines: `topic Q0 docid rank score tag`, scores printed with six
//! decimals. Fields are whitespace-separated; [`write_run`] followed by
//! [`parse_run`] and another write reproduces the file byte for byte.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{open_buffered, Error, Result};
use crate::eval::{Qrels, Run};

pub fn parse_qrels(path: &Path) -> Result<Qrels> {
    let reader = open_buffered(path)?;
    let mut qrels = Qrels::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| crate::error::io_err(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(format_err(path, line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let grade: i64 = fields[3]
            .parse()
            .map_err(|_| format_err(path, line_no, format!("bad grade {:?}", fields[3])))?;
        if grade < 0 {
            return Err(format_err(path, line_no, format!("negative grade {grade}")));
        }
        let topic = fields[0].to_string();
        let doc = fields[2].to_string();
        let entry = qrels.topics.entry(topic.clone()).or_default();
        if entry.insert(doc.clone(), grade as u32).is_some() {
            return Err(Error::DuplicateEntry { topic, doc_id: doc });
        }
    }
    Ok(qrels)
}

pub fn parse_run(path: &Path) -> Result<Run> {
    let reader = open_buffered(path)?;
    let mut run = Run::default();
    let mut seen: std::collections::HashSet<(String, String)> = std::collections::HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| crate::error::io_err(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(format_err(path, line_no, format!("expected 6 fields, got {}", fields.len())));
        }
        let _rank: u64 = fields[3]
            .parse()
            .map_err(|_| format_err(path, line_no, format!("bad rank {:?}", fields[3])))?;
        let score: f64 = fields[4]
            .parse()
            .map_err(|_| format_err(path, line_no, format!("bad score {:?}", fields[4])))?;
        let topic = fields[0].to_string();
        let doc = fields[2].to_string();
        if !seen.insert((topic.clone(), doc.clone())) {
            return Err(Error::DuplicateEntry { topic, doc_id: doc });
        }
        if run.tag.is_empty() {
            run.tag = fields[5].to_string();
        }
        run.topics.entry(topic).or_default().push((doc, score));
    }
    Ok(run)
}

/// Write a run in TREC submission format. Topics emit in sorted order,
/// entries in list order with ranks assigned by position.
pub fn write_run(run: &Run, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| crate::error::io_err(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let tag = if run.tag.is_empty() { "run" } else { &run.tag };
    for (topic, entries) in &run.topics {
        for (rank, (doc, score)) in entries.iter().enumerate() {
            writeln!(w, "{topic} Q0 {doc} {} {score:.6} {tag}", rank + 1)
                .map_err(|e| crate::error::io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| crate::error::io_err(path, e))
}

fn format_err(path: &Path, line: u64, message: String) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("file.txt");
        std::fs::write(&path, content).unwrap();
        (dir, path)
    }

    #[test]
    fn parse_single_run_line() {
        let (_dir, path) = write_temp("42 Q0 doc7 1 13.370000 tagA\n");
        let run = parse_run(&path).unwrap();
        assert_eq!(run.tag, "tagA");
        assert_eq!(run.ranking("42"), [("doc7".to_string(), 13.37)]);
    }

    #[test]
    fn duplicate_doc_in_topic_rejected() {
        let (_dir, path) = write_temp("42 Q0 d1 1 2.000000 t\n42 Q0 d1 2 1.000000 t\n");
        assert!(matches!(parse_run(&path), Err(Error::DuplicateEntry { .. })));
    }

    #[test]
    fn run_round_trip_is_byte_identical() {
        let mut run = Run::new("myrun");
        for t in 0..5 {
            let entries: Vec<(String, f64)> = (0..20)
                .map(|i| (format!("doc{:03}", i * 7 % 100), 100.0 - i as f64 * 0.37))
                .collect();
            run.topics.insert(format!("t{t}"), entries);
        }
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("run1.txt");
        let second = dir.path().join("run2.txt");
        write_run(&run, &first).unwrap();
        let parsed = parse_run(&first).unwrap();
        write_run(&parsed, &second).unwrap();
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }

    #[test]
    fn qrels_parse_and_relevant_count() {
        let (_dir, path) = write_temp("t1 0 d1 1\nt1 0 d2 0\nt2 0 d1 2\n");
        let qrels = parse_qrels(&path).unwrap();
        assert_eq!(qrels.relevant_count("t1"), 1);
        assert_eq!(qrels.relevant_count("t2"), 1);
        assert_eq!(qrels.topics["t2"]["d1"], 2);
    }

    #[test]
    fn qrels_negative_grade_rejected() {
        let (_dir, path) = write_temp("t1 0 d1 -1\n");
        assert!(matches!(parse_qrels(&path), Err(Error::Format { line: 1, .. })));
    }

    #[test]
    fn qrels_duplicate_pair_rejected() {
        let (_dir, path) = write_temp("t1 0 d1 1\nt1 0 d1 2\n");
        assert!(matches!(parse_qrels(&path), Err(Error::DuplicateEntry { .. })));
    }

    #[test]
    fn malformed_line_names_line_number() {
        let (_dir, path) = write_temp("t1 0 d1 1\nbroken line\n");
        match parse_qrels(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_missing_input() {
        assert!(matches!(
            parse_run(Path::new("/no/such/run.txt")),
            Err(Error::MissingInput { .. })
        ));
    }
}
