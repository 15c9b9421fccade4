//! Directories of numbered frame files plus the raw-format dimension
//! sidecar, shared by colour frames and intensity maps.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const DIMS_FILE: &str = "dims.txt";

pub fn frame_name(index: usize, ext: &str) -> String {
    format!("frame_{index:06}.{ext}")
}

/// Frame files of `dir` with one of `exts`, ordered by index.
///
/// Fails on mixed formats, gaps in the numbering or an empty directory.
pub fn scan(dir: &Path, exts: &[&str]) -> Result<(String, Vec<PathBuf>)> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found: Vec<(usize, String, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some((stem, ext)) = name.rsplit_once('.') else {
            continue;
        };
        let Some(digits) = stem.strip_prefix("frame_") else {
            continue;
        };
        if digits.len() != 6 || !exts.contains(&ext) {
            continue;
        }
        let Ok(index) = digits.parse::<usize>() else {
            continue;
        };
        found.push((index, ext.to_string(), path));
    }
    if found.is_empty() {
        return Err(Error::format(dir, "no frames found"));
    }
    found.sort_by_key(|f| f.0);
    let ext = found[0].1.clone();
    if found.iter().any(|f| f.1 != ext) {
        return Err(Error::format(dir, "mixed frame formats"));
    }
    for (want, f) in found.iter().enumerate() {
        if f.0 != want {
            return Err(Error::format(dir, format!("missing frame {want}")));
        }
    }
    Ok((ext, found.into_iter().map(|f| f.2).collect()))
}

/// Parses the sidecar text `W H N`.
pub fn parse_dims(text: &str) -> Option<(usize, usize, usize)> {
    let mut it = text.split_ascii_whitespace().map(|t| t.parse::<usize>());
    let w = it.next()?.ok()?;
    let h = it.next()?.ok()?;
    let n = it.next()?.ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((w, h, n))
}

pub fn dims_text(width: usize, height: usize, frames: usize) -> String {
    format!("{width} {height} {frames}\n")
}

pub fn read_dims(dir: &Path) -> Result<(usize, usize, usize)> {
    let path = dir.join(DIMS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    parse_dims(&text).ok_or_else(|| Error::format(&path, "malformed dimensions sidecar"))
}

pub fn write_dims(dir: &Path, width: usize, height: usize, frames: usize) -> Result<()> {
    let path = dir.join(DIMS_FILE);
    fs::write(&path, dims_text(width, height, frames)).map_err(|e| Error::io(&path, e))
}

/// Creates `dir` and removes frame files left over from an earlier write.
pub fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let stale = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("frame_") || n == DIMS_FILE);
        if stale && path.is_file() {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

/// Header of a binary netpbm file (`P5`/`P6`, maxval 255) and the payload
/// that follows it.
pub fn parse_netpbm<'a>(path: &Path, bytes: &'a [u8], magic: &str) -> Result<(usize, usize, &'a [u8])> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(path, "malformed header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap_or(""));
    }
    if fields[0] != magic {
        return Err(Error::format(path, format!("expected {magic} header")));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::format(path, "malformed header"));
    let (w, h, max) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if max != 255 {
        return Err(Error::format(path, "only 8-bit samples are supported"));
    }
    if w == 0 || h == 0 {
        return Err(Error::format(path, "zero-size frame"));
    }
    // Exactly one whitespace byte separates the header from the samples.
    if pos >= bytes.len() {
        return Err(Error::format(path, "truncated frame"));
    }
    Ok((w, h, &bytes[pos + 1..]))
}

pub fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) as f64 * 255.0 + 0.5).floor() as u8
}

pub fn f32s_from_le(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}
