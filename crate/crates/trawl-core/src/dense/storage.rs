//! Vector file formats and dense-index persistence.
//!
//! The binary vector file is the interchange format external encoders write:
//!
//! ```text
//! magic     8 bytes  "TRWLVEC1"
//! version   u32 LE   1
//! dim       u32 LE
//! count     u64 LE
//! record:   id (u32 len + UTF-8 bytes), dim × f32 LE
//! ```
//!
//! The text alternative is one record per line: `id<TAB>c0 c1 c2 ...` with
//! components printed in shortest round-trip form. [`read_vectors`] sniffs
//! the magic bytes and accepts either.
//!
//! A saved dense index is a directory holding `dense.bin`, which extends the
//! record with the parent doc id so the segment -> document map survives the
//! round trip.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::binio::*;
use crate::dense::{DenseIndex, EmbeddingVector};
use crate::error::{Error, Result};

const VEC_MAGIC: &[u8; 8] = b"TRWLVEC1";
const IDX_MAGIC: &[u8; 8] = b"TRWLDNX1";
const VERSION: u32 = 1;
const INDEX_FILE: &str = "dense.bin";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorFileFormat {
    Binary,
    Text,
}

impl VectorFileFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "binary" | "bin" => Some(Self::Binary),
            "text" | "txt" => Some(Self::Text),
            _ => None,
        }
    }
}

/// Write vectors in the binary interchange format.
pub fn write_vectors_binary(path: &Path, vectors: &[EmbeddingVector]) -> Result<()> {
    let dim = check_uniform(vectors)?;
    let file = std::fs::File::create(path).map_err(|e| crate::error::io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write_bytes(&mut w, path, VEC_MAGIC)?;
    write_u32(&mut w, path, VERSION)?;
    write_u32(&mut w, path, dim as u32)?;
    write_u64(&mut w, path, vectors.len() as u64)?;
    for v in vectors {
        write_string(&mut w, path, &v.id)?;
        for &c in &v.components {
            write_f32(&mut w, path, c)?;
        }
    }
    w.flush().map_err(|e| crate::error::io_err(path, e))
}

pub fn read_vectors_binary(path: &Path) -> Result<Vec<EmbeddingVector>> {
    let mut r = open_reader(path)?;
    expect_magic(&mut r, path, VEC_MAGIC, "vector file")?;
    expect_version(&mut r, path, VERSION)?;
    let dim = read_u32(&mut r, path)? as usize;
    let count = read_u64(&mut r, path)? as usize;
    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        let id = read_string(&mut r, path)?;
        let mut components = Vec::with_capacity(dim);
        for _ in 0..dim {
            components.push(read_f32(&mut r, path)?);
        }
        vectors.push(EmbeddingVector { id, components });
    }
    Ok(vectors)
}

/// Write vectors as text lines: `id<TAB>c0 c1 ...`.
pub fn write_vectors_text(path: &Path, vectors: &[EmbeddingVector]) -> Result<()> {
    check_uniform(vectors)?;
    let file = std::fs::File::create(path).map_err(|e| crate::error::io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for v in vectors {
        if v.id.contains(['\t', '\n']) {
            return Err(Error::InvalidConfig(format!(
                "vector id {:?} contains tab or newline; not representable in text format",
                v.id
            )));
        }
        write!(w, "{}\t", v.id).map_err(|e| crate::error::io_err(path, e))?;
        for (i, c) in v.components.iter().enumerate() {
            if i > 0 {
                w.write_all(b" ").map_err(|e| crate::error::io_err(path, e))?;
            }
            write!(w, "{c}").map_err(|e| crate::error::io_err(path, e))?;
        }
        w.write_all(b"\n").map_err(|e| crate::error::io_err(path, e))?;
    }
    w.flush().map_err(|e| crate::error::io_err(path, e))
}

pub fn read_vectors_text(path: &Path) -> Result<Vec<EmbeddingVector>> {
    let r = open_reader(path)?;
    let mut vectors = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| crate::error::io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i as u64 + 1;
        let (id, rest) = line.split_once('\t').ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            line: line_no,
            message: "expected id<TAB>components".to_string(),
        })?;
        let components = rest
            .split_whitespace()
            .map(|t| t.parse::<f32>())
            .collect::<std::result::Result<Vec<f32>, _>>()
            .map_err(|e| Error::Format {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("bad component: {e}"),
            })?;
        vectors.push(EmbeddingVector::new(id.to_string(), components));
    }
    Ok(vectors)
}

/// Read a vector file in either format, sniffing the binary magic.
pub fn read_vectors(path: &Path) -> Result<Vec<EmbeddingVector>> {
    let mut r = open_reader(path)?;
    let mut head = [0u8; 8];
    let n = r.read(&mut head).map_err(|e| crate::error::io_err(path, e))?;
    drop(r);
    if n == 8 && &head == VEC_MAGIC {
        read_vectors_binary(path)
    } else {
        read_vectors_text(path)
    }
}

impl DenseIndex {
    /// Persist into `dir` (created if missing).
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| crate::error::io_err(dir, e))?;
        let path = dir.join(INDEX_FILE);
        let file = std::fs::File::create(&path).map_err(|e| crate::error::io_err(&path, e))?;
        let mut w = BufWriter::new(file);
        write_bytes(&mut w, &path, IDX_MAGIC)?;
        write_u32(&mut w, &path, VERSION)?;
        write_u32(&mut w, &path, self.dimension() as u32)?;
        write_u64(&mut w, &path, self.len() as u64)?;
        for (id, parent, row) in self.rows() {
            write_string(&mut w, &path, id)?;
            write_string(&mut w, &path, parent)?;
            for &c in row {
                write_f32(&mut w, &path, c)?;
            }
        }
        w.flush().map_err(|e| crate::error::io_err(&path, e))
    }

    /// Load an index previously written by [`DenseIndex::save`].
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(INDEX_FILE);
        let mut r = BufReader::new(
            std::fs::File::open(&path).map_err(|_| Error::MissingInput { path: path.clone() })?,
        );
        expect_magic(&mut r, &path, IDX_MAGIC, "dense index")?;
        expect_version(&mut r, &path, VERSION)?;
        let dim = read_u32(&mut r, &path)? as usize;
        let count = read_u64(&mut r, &path)? as usize;
        let mut ids = Vec::with_capacity(count);
        let mut parents = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * dim);
        for _ in 0..count {
            ids.push(read_string(&mut r, &path)?);
            parents.push(read_string(&mut r, &path)?);
            for _ in 0..dim {
                data.push(read_f32(&mut r, &path)?);
            }
        }
        DenseIndex::from_parts(dim, ids, parents, data)
    }
}

fn check_uniform(vectors: &[EmbeddingVector]) -> Result<usize> {
    let dim = vectors.first().map_or(0, EmbeddingVector::dimension);
    for v in vectors {
        if v.dimension() != dim {
            return Err(Error::DimensionMismatch {
                id: v.id.clone(),
                expected: dim,
                got: v.dimension(),
            });
        }
    }
    Ok(dim)
}

fn open_reader(path: &Path) -> Result<BufReader<std::fs::File>> {
    if !path.exists() {
        return Err(Error::MissingInput {
            path: path.to_path_buf(),
        });
    }
    Ok(BufReader::new(
        std::fs::File::open(path).map_err(|e| crate::error::io_err(path, e))?,
    ))
}
