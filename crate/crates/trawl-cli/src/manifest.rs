//! Run manifests: flat key-value records of what produced an output.
//!
//! A manifest carries the tool version, the subcommand, the seed, an FNV-64
//! digest of every input, and the effective parameters. It deliberately
//! excludes timestamps so reruns with identical config and inputs are
//! byte-identical.

use std::fmt::Display;
use std::path::Path;

use trawl_core::rng::fnv1a64;
use trawl_core::{Error, Result};

pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Self {
            entries: Vec::new(),
        };
        m.set("manifest.tool", "trawl");
        m.set("manifest.version", env!("CARGO_PKG_VERSION"));
        m.set("manifest.subcommand", subcommand);
        m
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Record an input path and its content digest.
    pub fn input(&mut self, name: &str, path: &Path) -> Result<()> {
        self.set(&format!("input.{name}.path"), path.display());
        self.set(
            &format!("input.{name}.fnv64"),
            format!("{:016x}", digest_path(path)?),
        );
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (key, value) in &self.entries {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

/// FNV-64 digest of a file's bytes, or of a directory's (name, bytes) pairs
/// in sorted filename order.
pub fn digest_path(path: &Path) -> Result<u64> {
    if !path.exists() {
        return Err(Error::MissingInput {
            path: path.to_path_buf(),
        });
    }
    let io = |e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    if path.is_dir() {
        let mut names: Vec<std::path::PathBuf> = std::fs::read_dir(path)
            .map_err(io)?
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(io)?
            .into_iter()
            .map(|entry| entry.path())
            .collect();
        names.sort();
        let mut acc: u64 = 0xcbf2_9ce4_8422_2325;
        for child in names {
            let name = child.file_name().unwrap_or_default();
            acc ^= fnv1a64(name.to_string_lossy().as_bytes());
            acc = acc.rotate_left(17);
            acc ^= digest_path(&child)?;
            acc = acc.rotate_left(17);
        }
        Ok(acc)
    } else {
        let bytes = std::fs::read(path).map_err(io)?;
        Ok(fnv1a64(&bytes))
    }
}
