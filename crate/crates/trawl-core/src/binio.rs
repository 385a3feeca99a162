//! Little-endian binary primitives shared by the index and vector formats.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn write_u32<W: Write>(w: &mut W, path: &Path, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())
        .map_err(|e| crate::error::io_err(path, e))
}

pub(crate) fn write_u64<W: Write>(w: &mut W, path: &Path, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())
        .map_err(|e| crate::error::io_err(path, e))
}

pub(crate) fn write_f32<W: Write>(w: &mut W, path: &Path, v: f32) -> Result<()> {
    w.write_all(&v.to_le_bytes())
        .map_err(|e| crate::error::io_err(path, e))
}

pub(crate) fn write_bytes<W: Write>(w: &mut W, path: &Path, b: &[u8]) -> Result<()> {
    w.write_all(b).map_err(|e| crate::error::io_err(path, e))
}

pub(crate) fn write_string<W: Write>(w: &mut W, path: &Path, s: &str) -> Result<()> {
    write_u32(w, path, s.len() as u32)?;
    write_bytes(w, path, s.as_bytes())
}

/// LEB128 unsigned varint.
pub(crate) fn write_varint<W: Write>(w: &mut W, path: &Path, mut v: u64) -> Result<()> {
    loop {
        let byte = (v & 0x7F) as u8;
        v >>= 7;
        if v == 0 {
            return write_bytes(w, path, &[byte]);
        }
        write_bytes(w, path, &[byte | 0x80])?;
    }
}

pub(crate) fn read_exact<R: Read>(r: &mut R, path: &Path, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| crate::error::io_err(path, e))
}

pub(crate) fn read_u32<R: Read>(r: &mut R, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, path, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

pub(crate) fn read_u64<R: Read>(r: &mut R, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, path, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub(crate) fn read_f32<R: Read>(r: &mut R, path: &Path) -> Result<f32> {
    let mut buf = [0u8; 4];
    read_exact(r, path, &mut buf)?;
    Ok(f32::from_le_bytes(buf))
}

pub(crate) fn read_string<R: Read>(r: &mut R, path: &Path) -> Result<String> {
    let len = read_u32(r, path)? as usize;
    let mut buf = vec![0u8; len];
    read_exact(r, path, &mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Format {
        path: path.to_path_buf(),
        line: 0,
        message: "invalid UTF-8 in string field".to_string(),
    })
}

pub(crate) fn read_varint<R: Read>(r: &mut R, path: &Path) -> Result<u64> {
    let mut value: u64 = 0;
    let mut shift = 0u32;
    loop {
        let mut byte = [0u8; 1];
        read_exact(r, path, &mut byte)?;
        value |= ((byte[0] & 0x7F) as u64) << shift;
        if byte[0] & 0x80 == 0 {
            return Ok(value);
        }
        shift += 7;
        if shift >= 64 {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: 0,
                message: "varint overflow".to_string(),
            });
        }
    }
}

/// Check an 8-byte magic header, mapping mismatch to [`Error::BadMagic`].
pub(crate) fn expect_magic<R: Read>(r: &mut R, path: &Path, magic: &[u8; 8], what: &'static str) -> Result<()> {
    let mut buf = [0u8; 8];
    read_exact(r, path, &mut buf)?;
    if &buf != magic {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: what,
        });
    }
    Ok(())
}

/// Check a format version, mapping mismatch to [`Error::UnsupportedVersion`].
pub(crate) fn expect_version<R: Read>(r: &mut R, path: &Path, expected: u32) -> Result<()> {
    let found = read_u32(r, path)?;
    if found != expected {
        return Err(Error::UnsupportedVersion {
            path: path.to_path_buf(),
            found,
            expected,
        });
    }
    Ok(())
}
