//! Table files.
//!
//! Binary layout, all little-endian: 8-byte magic (`IALUT4D1` or
//! `IALUT3D1`), `u32` grid size `L`, `u32` flags, `D` grid arrays of `L`
//! floats each, then `3 * L^D` float values, channel fastest and red axis
//! slowest. Floats are `f32` unless flag bit 0 is set, in which case they
//! are `f64`. The text form carries the same data as lines: a header, `L`,
//! one line per grid, then one `r g b` line per node in the same order.
//!
//! Basis sidecars (`IABASIS1`) hold `D`, `L`, `T` and the clip count as
//! `u32`, the grids and `T` unclamped value arrays as `f32`, then the
//! per-clip weights as `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ialut_core::{BasisLutSet, Grid1D, IaLut4, Lut, Lut3, WeightVector};

use crate::error::{Error, Result};

const MAGIC_4D: &[u8; 8] = b"IALUT4D1";
const MAGIC_3D: &[u8; 8] = b"IALUT3D1";
const MAGIC_BASIS: &[u8; 8] = b"IABASIS1";
const TEXT_4D: &str = "IALUT 4D TEXT";
const TEXT_3D: &str = "IALUT 3D TEXT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LutFormat {
    Binary,
    /// Binary with double-precision grids and values.
    Binary64,
    Text,
}

impl LutFormat {
    /// Text for `.txt` paths, binary otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("txt") => LutFormat::Text,
            _ => LutFormat::Binary,
        }
    }
}

/// A table of either dimensionality, as found in a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyLut {
    Ia(IaLut4),
    Tri(Lut3),
}

impl AnyLut {
    pub fn size(&self) -> usize {
        match self {
            AnyLut::Ia(l) => l.size(),
            AnyLut::Tri(l) => l.size(),
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            AnyLut::Ia(l) => l.values(),
            AnyLut::Tri(l) => l.values(),
        }
    }

    /// The table as an intensity-aware one; an RGB table is extended
    /// constantly along the intensity axis.
    pub fn into_ialut(self) -> Result<IaLut4> {
        match self {
            AnyLut::Ia(l) => Ok(l),
            AnyLut::Tri(l) => {
                let [r, g, b] = l.grids().clone();
                let size = l.size();
                let grids = [r, g, b, Grid1D::uniform(size)?];
                let mut values = Vec::with_capacity(l.values().len() * size);
                for node in l.values().chunks_exact(3) {
                    for _ in 0..size {
                        values.extend_from_slice(node);
                    }
                }
                Ok(Lut::new(grids, values)?)
            }
        }
    }
}

const FLAG_F64: u32 = 1;

fn write_f32s(out: &mut Vec<u8>, values: impl IntoIterator<Item = f64>) {
    for v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

fn write_floats(out: &mut Vec<u8>, values: impl IntoIterator<Item = f64>, wide: bool) {
    if wide {
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    } else {
        write_f32s(out, values);
    }
}

fn encode_binary<const D: usize>(lut: &Lut<D>, magic: &[u8; 8], wide: bool) -> Vec<u8> {
    let width = if wide { 8 } else { 4 };
    let mut out = Vec::with_capacity(16 + width * (D * lut.size() + lut.values().len()));
    out.extend_from_slice(magic);
    out.extend_from_slice(&(lut.size() as u32).to_le_bytes());
    out.extend_from_slice(&(if wide { FLAG_F64 } else { 0 }).to_le_bytes());
    for g in lut.grids() {
        write_floats(&mut out, g.points().iter().copied(), wide);
    }
    write_floats(&mut out, lut.values().iter().map(|v| v.clamp(0.0, 1.0)), wide);
    out
}

fn encode_text<const D: usize>(lut: &Lut<D>, header: &str) -> String {
    let mut s = String::with_capacity(lut.values().len() * 11 + 64);
    let _ = writeln!(s, "{header}");
    let _ = writeln!(s, "{}", lut.size());
    for g in lut.grids() {
        let line: Vec<String> = g.points().iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    for px in lut.values().chunks_exact(3) {
        let c = |v: f64| v.clamp(0.0, 1.0);
        let _ = writeln!(s, "{:.8} {:.8} {:.8}", c(px[0]), c(px[1]), c(px[2]));
    }
    s
}

pub fn write_lut(lut: &AnyLut, path: &Path, format: LutFormat) -> Result<()> {
    let bytes = match (lut, format) {
        (AnyLut::Ia(l), LutFormat::Binary) => encode_binary(l, MAGIC_4D, false),
        (AnyLut::Tri(l), LutFormat::Binary) => encode_binary(l, MAGIC_3D, false),
        (AnyLut::Ia(l), LutFormat::Binary64) => encode_binary(l, MAGIC_4D, true),
        (AnyLut::Tri(l), LutFormat::Binary64) => encode_binary(l, MAGIC_3D, true),
        (AnyLut::Ia(l), LutFormat::Text) => encode_text(l, TEXT_4D).into_bytes(),
        (AnyLut::Tri(l), LutFormat::Text) => encode_text(l, TEXT_3D).into_bytes(),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Format of an existing table file, judged by its leading bytes.
pub fn detect_format(path: &Path) -> Result<LutFormat> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() >= 16 && (&bytes[..8] == MAGIC_4D || &bytes[..8] == MAGIC_3D) {
        let flags = u32::from_le_bytes([bytes[12], bytes[13], bytes[14], bytes[15]]);
        return Ok(if flags & FLAG_F64 != 0 { LutFormat::Binary64 } else { LutFormat::Binary });
    }
    if bytes.starts_with(TEXT_4D.as_bytes()) || bytes.starts_with(TEXT_3D.as_bytes()) {
        return Ok(LutFormat::Text);
    }
    Err(Error::format(path, "magic mismatch"))
}

pub fn read_lut(path: &Path) -> Result<AnyLut> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() >= 8 && &bytes[..8] == MAGIC_4D {
        return Ok(AnyLut::Ia(decode_binary::<4>(path, &bytes[8..])?));
    }
    if bytes.len() >= 8 && &bytes[..8] == MAGIC_3D {
        return Ok(AnyLut::Tri(decode_binary::<3>(path, &bytes[8..])?));
    }
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::format(path, "magic mismatch"))?;
    match text.lines().next().map(str::trim) {
        Some(TEXT_4D) => Ok(AnyLut::Ia(decode_text::<4>(path, text)?)),
        Some(TEXT_3D) => Ok(AnyLut::Tri(decode_text::<3>(path, text)?)),
        _ => Err(Error::format(path, "magic mismatch")),
    }
}

/// Reads a table that must be intensity-aware.
pub fn read_ialut(path: &Path) -> Result<IaLut4> {
    match read_lut(path)? {
        AnyLut::Ia(l) => Ok(l),
        AnyLut::Tri(_) => Err(Error::format(path, "expected a 4D table")),
    }
}

/// Sequential little-endian reader over a byte slice.
struct Cursor<'a> {
    path: &'a Path,
    bytes: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::format(self.path, "length mismatch"));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn floats(&mut self, n: usize, wide: bool) -> Result<Vec<f64>> {
        if wide {
            self.f64s(n)
        } else {
            self.f32s(n)
        }
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let len = n.checked_mul(4).ok_or_else(|| Error::format(self.path, "length mismatch"))?;
        Ok(crate::seqdir::f32s_from_le(self.take(len)?)
            .into_iter()
            .map(f64::from)
            .collect())
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let len = n.checked_mul(8).ok_or_else(|| Error::format(self.path, "length mismatch"))?;
        Ok(self
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }

    fn finish(&self) -> Result<()> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(Error::format(self.path, "length mismatch"))
        }
    }
}

/// Grid from stored points; a grid that matches the uniform one at `f32`
/// precision is restored to the exact uniform grid.
fn make_grid(path: &Path, points: Vec<f64>) -> Result<Grid1D> {
    if points.len() >= 2 {
        let uniform = Grid1D::uniform(points.len())?;
        if uniform.points().iter().zip(&points).all(|(u, p)| (*u as f32) as f64 == *p) {
            return Ok(uniform);
        }
    }
    Grid1D::new(points).map_err(|e| Error::format(path, e))
}

fn table_len(path: &Path, size: usize, dims: usize) -> Result<usize> {
    size.checked_pow(dims as u32)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::format(path, "table too large"))
}

fn read_grids<const D: usize>(cur: &mut Cursor, size: usize, wide: bool) -> Result<[Grid1D; D]> {
    let mut grids = Vec::with_capacity(D);
    for _ in 0..D {
        let points = cur.floats(size, wide)?;
        grids.push(if wide {
            Grid1D::new(points).map_err(|e| Error::format(cur.path, e))?
        } else {
            make_grid(cur.path, points)?
        });
    }
    Ok(grids.try_into().expect("D grids"))
}

fn decode_binary<const D: usize>(path: &Path, body: &[u8]) -> Result<Lut<D>> {
    let mut cur = Cursor { path, bytes: body };
    let size = cur.u32()? as usize;
    let flags = cur.u32()?;
    if flags & !FLAG_F64 != 0 {
        return Err(Error::format(path, format!("unknown flags {flags:#x}")));
    }
    let wide = flags & FLAG_F64 != 0;
    if size < 2 {
        return Err(Error::format(path, "grid size must be >= 2"));
    }
    let grids = read_grids::<D>(&mut cur, size, wide)?;
    let values = cur.floats(table_len(path, size, D)?, wide)?;
    cur.finish()?;
    Lut::new(grids, values).map_err(|e| Error::format(path, e))
}

fn decode_text<const D: usize>(path: &Path, text: &str) -> Result<Lut<D>> {
    let mut lines = text.lines().skip(1).filter(|l| !l.trim().is_empty());
    let mut next = || lines.next().ok_or_else(|| Error::format(path, "length mismatch"));
    let size: usize = next()?
        .trim()
        .parse()
        .map_err(|_| Error::format(path, "malformed grid size"))?;
    if size < 2 {
        return Err(Error::format(path, "grid size must be >= 2"));
    }
    let parse = |tok: &str| tok.parse::<f64>().map_err(|_| Error::format(path, format!("bad number {tok:?}")));
    let mut grids = Vec::with_capacity(D);
    for _ in 0..D {
        let pts = next()?.split_ascii_whitespace().map(parse).collect::<Result<Vec<_>>>()?;
        if pts.len() != size {
            return Err(Error::format(path, "length mismatch"));
        }
        grids.push(Grid1D::new(pts).map_err(|e| Error::format(path, e))?);
    }
    let grids: [Grid1D; D] = grids.try_into().expect("D grids");
    let want = table_len(path, size, D)?;
    let mut values = Vec::with_capacity(want);
    for line in lines {
        let row = line.split_ascii_whitespace().map(parse).collect::<Result<Vec<_>>>()?;
        if row.len() != 3 {
            return Err(Error::format(path, "expected three values per line"));
        }
        values.extend(row);
    }
    if values.len() != want {
        return Err(Error::format(path, "length mismatch"));
    }
    Lut::new(grids, values).map_err(|e| Error::format(path, e))
}

pub fn write_basis<const D: usize>(basis: &BasisLutSet<D>, weights: &[WeightVector], path: &Path) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC_BASIS);
    for n in [D, basis.size(), basis.count(), weights.len()] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for g in basis.grids() {
        write_f32s(&mut out, g.points().iter().copied());
    }
    for t in 0..basis.count() {
        write_f32s(&mut out, basis.basis_values(t).iter().copied());
    }
    for w in weights {
        if w.len() != basis.count() {
            return Err(Error::Shape("weight vector length differs from basis count".into()));
        }
        for v in w.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_basis<const D: usize>(path: &Path) -> Result<(BasisLutSet<D>, Vec<WeightVector>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 8 || &bytes[..8] != MAGIC_BASIS {
        return Err(Error::format(path, "magic mismatch"));
    }
    let mut cur = Cursor { path, bytes: &bytes[8..] };
    let dims = cur.u32()? as usize;
    if dims != D {
        return Err(Error::format(path, format!("expected {D}D basis, found {dims}D")));
    }
    let size = cur.u32()? as usize;
    let count = cur.u32()? as usize;
    let clips = cur.u32()? as usize;
    if size < 2 || count == 0 {
        return Err(Error::format(path, "malformed basis header"));
    }
    let grids = read_grids::<D>(&mut cur, size, false)?;
    let len = table_len(path, size, D)?;
    let mut luts = Vec::with_capacity(count);
    for _ in 0..count {
        luts.push(Lut::new(grids.clone(), cur.f32s(len)?).map_err(|e| Error::format(path, e))?);
    }
    let mut weights = Vec::with_capacity(clips);
    for _ in 0..clips {
        weights.push(WeightVector(cur.f64s(count)?));
    }
    cur.finish()?;
    Ok((BasisLutSet::from_luts(luts)?, weights))
}
