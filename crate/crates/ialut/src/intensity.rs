//! Intensity maps on disk: one 8-bit PGM (`P5`) per frame, or one raw
//! little-endian `f32` plane per frame with a `dims.txt` sidecar.

use std::fs;
use std::path::Path;

use ialut_core::IntensityMap;

use crate::error::{Error, Result};
use crate::seqdir::{self, frame_name};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Pgm,
    Raw,
}

pub fn read_intensity(dir: &Path) -> Result<IntensityMap> {
    let (ext, files) = seqdir::scan(dir, &["pgm", "raw"])?;
    let mut data = Vec::new();
    let (w, h) = if ext == "raw" {
        let (w, h, n) = seqdir::read_dims(dir)?;
        if n != files.len() {
            return Err(Error::format(dir, format!("missing frame {}", files.len().min(n))));
        }
        for path in &files {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            if bytes.len() != w * h * 4 {
                let what = if bytes.len() < w * h * 4 { "truncated frame" } else { "inconsistent dimensions" };
                return Err(Error::format(path, what));
            }
            data.extend(seqdir::f32s_from_le(&bytes));
        }
        (w, h)
    } else {
        let mut dims = None;
        for path in &files {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            let (w, h, payload) = seqdir::parse_netpbm(path, &bytes, "P5")?;
            if dims.is_some_and(|d| d != (w, h)) {
                return Err(Error::format(path, "inconsistent dimensions"));
            }
            dims = Some((w, h));
            if payload.len() < w * h {
                return Err(Error::format(path, "truncated frame"));
            }
            data.extend(payload[..w * h].iter().map(|&b| b as f32 / 255.0));
        }
        dims.expect("scan returns at least one frame")
    };
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::format(dir, format!("non-finite intensity at sample {i}")));
    }
    Ok(IntensityMap::new(files.len(), h, w, data)?)
}

pub fn write_intensity(map: &IntensityMap, dir: &Path, format: MapFormat) -> Result<()> {
    seqdir::prepare_output(dir)?;
    let ext = match format {
        MapFormat::Pgm => "pgm",
        MapFormat::Raw => {
            seqdir::write_dims(dir, map.width(), map.height(), map.frames())?;
            "raw"
        }
    };
    for n in 0..map.frames() {
        let frame = map.frame(n);
        let bytes = match format {
            MapFormat::Pgm => {
                let mut out = format!("P5\n{} {}\n255\n", map.width(), map.height()).into_bytes();
                out.extend(frame.iter().map(|&v| seqdir::quantize(v)));
                out
            }
            MapFormat::Raw => frame.iter().flat_map(|v| v.to_le_bytes()).collect(),
        };
        let path = dir.join(frame_name(n, ext));
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
