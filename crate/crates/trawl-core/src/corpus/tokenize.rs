//! Tokenization.
//!
//! Rules are script-driven so mixed-script text analyzes sensibly under any
//! tag: alphabetic/numeric runs (latin, arabic, devanagari, ...) become
//! lowercased word tokens split on non-alphanumeric characters; runs of CJK
//! ideographs or kana become overlapping character bigrams, with a lone
//! character kept as a single token. No stemming or stopword removal is
//! applied; that is a deliberate gap relative to per-language analyzer
//! stacks, kept pluggable via the language tag.

use serde::{Deserialize, Serialize};

use crate::corpus::Document;

/// Tokenize `text` for indexing or querying.
///
/// Deterministic: identical input always yields the identical token list.
/// The `language` tag is the seam for per-language stemmers and stopword
/// lists; the current rules need only the script of each character.
pub fn tokenize(text: &str, language: &str) -> Vec<String> {
    let _ = language;
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut cjk_run: Vec<char> = Vec::new();

    for c in text.chars() {
        if is_cjk(c) {
            flush_word(&mut tokens, &mut word);
            cjk_run.push(c);
        } else if c.is_alphanumeric() {
            flush_cjk(&mut tokens, &mut cjk_run);
            for lc in c.to_lowercase() {
                word.push(lc);
            }
        } else {
            flush_word(&mut tokens, &mut word);
            flush_cjk(&mut tokens, &mut cjk_run);
        }
    }
    flush_word(&mut tokens, &mut word);
    flush_cjk(&mut tokens, &mut cjk_run);
    tokens
}

fn flush_word(tokens: &mut Vec<String>, word: &mut String) {
    if !word.is_empty() {
        tokens.push(std::mem::take(word));
    }
}

fn flush_cjk(tokens: &mut Vec<String>, run: &mut Vec<char>) {
    match run.len() {
        0 => {}
        1 => tokens.push(run[0].to_string()),
        n => {
            for i in 0..n - 1 {
                tokens.push(run[i..i + 2].iter().collect());
            }
        }
    }
    run.clear();
}

/// Han ideographs, kana, and hangul: the scripts analyzed as bigrams.
fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF      // hiragana, katakana
        | 0x3400..=0x4DBF    // CJK extension A
        | 0x4E00..=0x9FFF    // CJK unified ideographs
        | 0xAC00..=0xD7AF    // hangul syllables
        | 0xF900..=0xFAFF    // CJK compatibility ideographs
        | 0x20000..=0x2FA1F  // CJK extensions B and beyond
    )
}

/// Which document fields feed the sparse index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FieldPolicy {
    /// Title concatenated with the body (the default).
    #[default]
    TitleAndText,
    /// Body only.
    TextOnly,
}

impl FieldPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldPolicy::TitleAndText => "title-and-text",
            FieldPolicy::TextOnly => "text",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "title-and-text" => Some(FieldPolicy::TitleAndText),
            "text" | "text-only" => Some(FieldPolicy::TextOnly),
            _ => None,
        }
    }
}

/// Tokenize configuration for index builds and queries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analyzer {
    pub fields: FieldPolicy,
}

impl Analyzer {
    pub fn new(fields: FieldPolicy) -> Self {
        Self { fields }
    }

    /// Tokens of a document under the field policy.
    pub fn index_tokens(&self, doc: &Document) -> Vec<String> {
        match self.fields {
            FieldPolicy::TextOnly => tokenize(&doc.text, &doc.language),
            FieldPolicy::TitleAndText => {
                if doc.title.is_empty() {
                    tokenize(&doc.text, &doc.language)
                } else {
                    let mut tokens = tokenize(&doc.title, &doc.language);
                    tokens.extend(tokenize(&doc.text, &doc.language));
                    tokens
                }
            }
        }
    }

    /// Tokens of a query string.
    pub fn query_tokens(&self, text: &str, language: &str) -> Vec<String> {
        tokenize(text, language)
    }
}
