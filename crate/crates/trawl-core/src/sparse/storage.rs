//! On-disk format for the inverted index.
//!
//! A saved index is a directory containing `index.bin`:
//!
//! ```text
//! magic          8 bytes  "TRWLSIDX"
//! version        u32 LE   1
//! field_policy   u8       0 = title-and-text, 1 = text only
//! language       u32 len + UTF-8 bytes
//! doc_count      u64
//! per document:  id (u32 len + bytes), doc_length u32
//! term_count     u64
//! per term (sorted): term (u32 len + bytes), postings_len u64,
//!                    postings as varints: first doc ordinal absolute,
//!                    then gaps (>= 1), each followed by the tf
//! ```
//!
//! Terms are written in sorted order and gaps are strictly positive, so a
//! save/load/save cycle is byte-identical. `avgdl` and the id map are
//! recomputed on load.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::binio::*;
use crate::corpus::{Analyzer, FieldPolicy};
use crate::error::{Error, Result};
use crate::sparse::{InvertedIndex, Posting};

const MAGIC: &[u8; 8] = b"TRWLSIDX";
const VERSION: u32 = 1;
const INDEX_FILE: &str = "index.bin";

impl InvertedIndex {
    /// Persist into `dir` (created if missing).
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| crate::error::io_err(dir, e))?;
        let path = dir.join(INDEX_FILE);
        let file = std::fs::File::create(&path).map_err(|e| crate::error::io_err(&path, e))?;
        let mut w = BufWriter::new(file);

        write_bytes(&mut w, &path, MAGIC)?;
        write_u32(&mut w, &path, VERSION)?;
        let policy = match self.analyzer.fields {
            FieldPolicy::TitleAndText => 0u8,
            FieldPolicy::TextOnly => 1u8,
        };
        write_bytes(&mut w, &path, &[policy])?;
        write_string(&mut w, &path, &self.language)?;

        write_u64(&mut w, &path, self.doc_ids.len() as u64)?;
        for (id, &len) in self.doc_ids.iter().zip(&self.doc_lengths) {
            write_string(&mut w, &path, id)?;
            write_u32(&mut w, &path, len)?;
        }

        write_u64(&mut w, &path, self.postings.len() as u64)?;
        for (term, postings) in &self.postings {
            write_string(&mut w, &path, term)?;
            write_u64(&mut w, &path, postings.len() as u64)?;
            let mut prev = 0u32;
            for (i, p) in postings.iter().enumerate() {
                let delta = if i == 0 { p.doc } else { p.doc - prev };
                write_varint(&mut w, &path, delta as u64)?;
                write_varint(&mut w, &path, p.tf as u64)?;
                prev = p.doc;
            }
        }
        w.flush().map_err(|e| crate::error::io_err(&path, e))?;
        Ok(())
    }

    /// Load an index previously written by [`InvertedIndex::save`].
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(INDEX_FILE);
        let mut r = BufReader::new(
            std::fs::File::open(&path).map_err(|_| Error::MissingInput { path: path.clone() })?,
        );
        expect_magic(&mut r, &path, MAGIC, "sparse index")?;
        expect_version(&mut r, &path, VERSION)?;

        let mut policy_byte = [0u8; 1];
        read_exact(&mut r, &path, &mut policy_byte)?;
        let fields = match policy_byte[0] {
            0 => FieldPolicy::TitleAndText,
            1 => FieldPolicy::TextOnly,
            other => {
                return Err(Error::Format {
                    path,
                    line: 0,
                    message: format!("unknown field policy byte {other}"),
                })
            }
        };
        let language = read_string(&mut r, &path)?;

        let doc_count = read_u64(&mut r, &path)? as usize;
        let mut doc_ids = Vec::with_capacity(doc_count);
        let mut doc_lengths = Vec::with_capacity(doc_count);
        for _ in 0..doc_count {
            doc_ids.push(read_string(&mut r, &path)?);
            doc_lengths.push(read_u32(&mut r, &path)?);
        }

        let term_count = read_u64(&mut r, &path)? as usize;
        let mut postings_map: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        for _ in 0..term_count {
            let term = read_string(&mut r, &path)?;
            let len = read_u64(&mut r, &path)? as usize;
            let mut postings = Vec::with_capacity(len);
            let mut doc = 0u32;
            for i in 0..len {
                let delta = read_varint(&mut r, &path)? as u32;
                if i > 0 && delta == 0 {
                    return Err(Error::Format {
                        path,
                        line: 0,
                        message: format!("non-increasing postings for term {term:?}"),
                    });
                }
                doc = if i == 0 { delta } else { doc + delta };
                let tf = read_varint(&mut r, &path)? as u32;
                postings.push(Posting { doc, tf });
            }
            postings_map.insert(term, postings);
        }

        if doc_count == 0 {
            return Err(Error::EmptyCorpus);
        }
        let total: u64 = doc_lengths.iter().map(|&l| l as u64).sum();
        let avgdl = total as f64 / doc_count as f64;
        let mut ordinals = HashMap::with_capacity(doc_count);
        for (i, id) in doc_ids.iter().enumerate() {
            if ordinals.insert(id.clone(), i as u32).is_some() {
                return Err(Error::DuplicateDocId { doc_id: id.clone() });
            }
        }

        Ok(InvertedIndex {
            postings: postings_map,
            doc_ids,
            doc_lengths,
            avgdl,
            analyzer: Analyzer::new(fields),
            language,
            ordinals,
        })
    }
}
