//! Corpus ingestion: documents, topics, sentence splitting, windowed
//! segmentation, and tokenization.
//!
//! The canonical corpus format is UTF-8 line-delimited JSON, one document per
//! line with fields `id`, `title`, `text`, `language`. Topics are either the
//! same line-delimited form (`id`, `text`) or classic TREC `<top>` markup.

mod segment;
mod sentence;
mod tokenize;

pub use segment::{segment_count, segment_document, Segment};
pub use sentence::split_sentences;
pub use tokenize::{tokenize, Analyzer, FieldPolicy};

use std::collections::HashSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{open_buffered, Error, Result};

/// A corpus record: the unit of sparse indexing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub text: String,
    #[serde(default)]
    pub language: String,
}

/// A search topic (query).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub id: String,
    pub text: String,
}

/// What to do with a malformed corpus line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MalformedPolicy {
    /// Stop with an error naming the line.
    #[default]
    Abort,
    /// Skip the record and report it in [`CorpusLoad::skipped`].
    Skip,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub on_malformed: MalformedPolicy,
}

/// Result of [`read_corpus`]: the documents plus any skipped-line reports.
#[derive(Debug)]
pub struct CorpusLoad {
    pub documents: Vec<Document>,
    /// (line number, message) for records skipped under [`MalformedPolicy::Skip`].
    pub skipped: Vec<(u64, String)>,
}

/// Streaming corpus reader. Yields documents in file order; duplicate ids
/// abort regardless of the malformed-line policy, since silently deduplicating
/// would corrupt qrels joins downstream.
pub struct CorpusReader<R> {
    reader: R,
    path: PathBuf,
    line_no: u64,
    seen_ids: HashSet<String>,
    options: LoadOptions,
    skipped: Vec<(u64, String)>,
    done: bool,
}

impl CorpusReader<std::io::BufReader<std::fs::File>> {
    pub fn open(path: &Path, options: LoadOptions) -> Result<Self> {
        Ok(Self::from_reader(open_buffered(path)?, path, options))
    }
}

impl<R: BufRead> CorpusReader<R> {
    pub fn from_reader(reader: R, path: &Path, options: LoadOptions) -> Self {
        Self {
            reader,
            path: path.to_path_buf(),
            line_no: 0,
            seen_ids: HashSet::new(),
            options,
            skipped: Vec::new(),
            done: false,
        }
    }

    /// Lines skipped so far under [`MalformedPolicy::Skip`].
    pub fn skipped(&self) -> &[(u64, String)] {
        &self.skipped
    }

    pub fn into_skipped(self) -> Vec<(u64, String)> {
        self.skipped
    }

    fn parse_line(&mut self, line: &str) -> std::result::Result<Option<Document>, String> {
        if line.trim().is_empty() {
            return Ok(None);
        }
        let doc: Document =
            serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
        if doc.id.is_empty() {
            return Err("empty doc id".to_string());
        }
        if normalize_whitespace(&doc.text).is_empty() {
            return Err(format!("doc {:?} has empty text", doc.id));
        }
        Ok(Some(doc))
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let mut line = String::new();
            match self.reader.read_line(&mut line) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(source) => {
                    self.done = true;
                    return Some(Err(crate::error::io_err(&self.path, source)));
                }
            }
            self.line_no += 1;
            match self.parse_line(&line) {
                Ok(None) => continue,
                Ok(Some(doc)) => {
                    if !self.seen_ids.insert(doc.id.clone()) {
                        self.done = true;
                        return Some(Err(Error::DuplicateDocId { doc_id: doc.id }));
                    }
                    return Some(Ok(doc));
                }
                Err(message) => match self.options.on_malformed {
                    MalformedPolicy::Abort => {
                        self.done = true;
                        return Some(Err(Error::Format {
                            path: self.path.clone(),
                            line: self.line_no,
                            message,
                        }));
                    }
                    MalformedPolicy::Skip => {
                        self.skipped.push((self.line_no, message));
                        continue;
                    }
                },
            }
        }
    }
}

/// Load a whole corpus file into memory.
pub fn read_corpus(path: &Path, options: LoadOptions) -> Result<CorpusLoad> {
    let mut reader = CorpusReader::open(path, options)?;
    let mut documents = Vec::new();
    for doc in &mut reader {
        documents.push(doc?);
    }
    Ok(CorpusLoad {
        documents,
        skipped: reader.into_skipped(),
    })
}

/// Write documents in the canonical line-delimited format.
pub fn write_corpus(path: &Path, docs: &[Document]) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| crate::error::io_err(path, e))?,
    );
    for doc in docs {
        serde_json::to_writer(&mut out, doc)
            .map_err(|e| crate::error::io_err(path, e.into()))?;
        out.write_all(b"\n")
            .map_err(|e| crate::error::io_err(path, e))?;
    }
    out.flush().map_err(|e| crate::error::io_err(path, e))?;
    Ok(())
}

/// Load topics from either line-delimited records or TREC `<top>` markup,
/// sniffed from the first non-blank character.
pub fn load_topics(path: &Path) -> Result<Vec<Topic>> {
    let mut reader = open_buffered(path)?;
    let mut content = String::new();
    std::io::Read::read_to_string(&mut reader, &mut content)
        .map_err(|e| crate::error::io_err(path, e))?;
    let topics = if content.trim_start().starts_with('<') {
        parse_trec_topics(&content, path)?
    } else {
        parse_topic_lines(&content, path)?
    };
    let mut seen = HashSet::new();
    for t in &topics {
        if !seen.insert(t.id.clone()) {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: 0,
                message: format!("duplicate topic id {:?}", t.id),
            });
        }
    }
    Ok(topics)
}

fn parse_topic_lines(content: &str, path: &Path) -> Result<Vec<Topic>> {
    let mut topics = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let topic: Topic = serde_json::from_str(line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: i as u64 + 1,
            message: format!("malformed topic: {e}"),
        })?;
        topics.push(topic);
    }
    Ok(topics)
}

/// Parse classic TREC topic markup: `<top>` blocks with `<num>` and `<title>`
/// tags. Tag payloads may sit on the tag line or run until the next tag.
fn parse_trec_topics(content: &str, path: &Path) -> Result<Vec<Topic>> {
    let mut topics = Vec::new();
    let mut num: Option<String> = None;
    let mut title = String::new();
    let mut in_title = false;

    let mut close_topic = |num: &mut Option<String>, title: &mut String| {
        if let Some(id) = num.take() {
            topics.push(Topic {
                id,
                text: normalize_whitespace(title),
            });
        }
        title.clear();
    };

    for line in content.lines() {
        let trimmed = line.trim();
        let lower = trimmed.to_ascii_lowercase();
        if lower.starts_with("<num>") {
            in_title = false;
            let rest = trimmed[5..].trim();
            let rest = rest
                .strip_prefix("Number:")
                .or_else(|| rest.strip_prefix("number:"))
                .unwrap_or(rest);
            let rest = rest.split('<').next().unwrap_or("").trim();
            num = Some(rest.to_string());
        } else if lower.starts_with("<title>") {
            in_title = true;
            let rest = trimmed[7..].trim();
            let rest = rest.split('<').next().unwrap_or("").trim();
            if !rest.is_empty() {
                title.push_str(rest);
                title.push(' ');
            }
        } else if trimmed.starts_with('<') {
            if lower.starts_with("</top>") {
                close_topic(&mut num, &mut title);
            }
            in_title = false;
        } else if in_title && !trimmed.is_empty() {
            title.push_str(trimmed);
            title.push(' ');
        }
    }
    close_topic(&mut num, &mut title);

    if topics.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            line: 0,
            message: "no <top> blocks with <num> found".to_string(),
        });
    }
    Ok(topics)
}

/// Collapse whitespace runs to single spaces and trim the ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reader_of(s: &str) -> CorpusReader<std::io::BufReader<&[u8]>> {
        CorpusReader::from_reader(
            std::io::BufReader::new(s.as_bytes()),
            Path::new("test.jsonl"),
            LoadOptions::default(),
        )
    }

    #[test]
    fn three_well_formed_lines_in_order() {
        let input = concat!(
            r#"{"id":"d1","title":"","text":"one","language":"en"}"#,
            "\n",
            r#"{"id":"d2","title":"","text":"two","language":"en"}"#,
            "\n",
            r#"{"id":"d3","title":"","text":"three","language":"en"}"#,
            "\n",
        );
        let docs: Vec<_> = reader_of(input).collect::<Result<_>>().unwrap();
        assert_eq!(docs.len(), 3);
        assert_eq!(docs[0].id, "d1");
        assert_eq!(docs[2].text, "three");
    }

    #[test]
    fn empty_file_yields_empty_stream() {
        let docs: Vec<_> = reader_of("").collect::<Result<Vec<_>>>().unwrap();
        assert!(docs.is_empty());
    }

    #[test]
    fn missing_text_field_names_line() {
        let input = concat!(
            r#"{"id":"d1","text":"ok"}"#,
            "\n",
            r#"{"id":"d2","title":"no body"}"#,
            "\n",
        );
        let err = reader_of(input)
            .collect::<Result<Vec<_>>>()
            .unwrap_err();
        match err {
            Error::Format { line, .. } => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn skip_policy_records_line() {
        let input = concat!(
            r#"{"id":"d1","text":"ok"}"#,
            "\n",
            "not json\n",
            r#"{"id":"d2","text":"ok"}"#,
            "\n",
        );
        let mut reader = CorpusReader::from_reader(
            std::io::BufReader::new(input.as_bytes()),
            Path::new("test.jsonl"),
            LoadOptions {
                on_malformed: MalformedPolicy::Skip,
            },
        );
        let docs: Vec<_> = (&mut reader).collect::<Result<_>>().unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(reader.skipped().len(), 1);
        assert_eq!(reader.skipped()[0].0, 2);
    }

    #[test]
    fn duplicate_doc_id_aborts_even_under_skip() {
        let input = concat!(
            r#"{"id":"d1","text":"a"}"#,
            "\n",
            r#"{"id":"d1","text":"b"}"#,
            "\n",
        );
        let mut reader = CorpusReader::from_reader(
            std::io::BufReader::new(input.as_bytes()),
            Path::new("test.jsonl"),
            LoadOptions {
                on_malformed: MalformedPolicy::Skip,
            },
        );
        let err = (&mut reader).collect::<Result<Vec<_>>>().unwrap_err();
        assert!(matches!(err, Error::DuplicateDocId { .. }));
    }

    #[test]
    fn trec_topic_markup_parses() {
        let content = "\
<top>
<num> Number: 301
<title> International Organized Crime
<desc> Description:
ignored
</top>
<top>
<num> 302 </num>
<title>
Poliomyelitis and Post-Polio
</top>
";
        let topics = parse_trec_topics(content, Path::new("topics.trec")).unwrap();
        assert_eq!(topics.len(), 2);
        assert_eq!(topics[0].id, "301");
        assert_eq!(topics[0].text, "International Organized Crime");
        assert_eq!(topics[1].id, "302");
        assert_eq!(topics[1].text, "Poliomyelitis and Post-Polio");
    }

    #[test]
    fn normalize_whitespace_collapses() {
        assert_eq!(normalize_whitespace("  a \t b\n\nc "), "a b c");
    }
}
