//! Frame sequences on disk: 8-bit binary PPM, or raw planar little-endian
//! `f32` with a `dims.txt` sidecar.

use std::fs;
use std::path::Path;

use ialut_core::VideoTensor;

use crate::error::{Error, Result};
use crate::seqdir::{self, frame_name};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFormat {
    Ppm,
    Raw,
}

impl FrameFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FrameFormat::Ppm => "ppm",
            FrameFormat::Raw => "raw",
        }
    }
}

pub fn read_frames(dir: &Path) -> Result<VideoTensor> {
    let (ext, files) = seqdir::scan(dir, &["ppm", "raw"])?;
    if ext == "raw" {
        read_raw(dir, &files)
    } else {
        read_ppm(&files)
    }
}

fn read_ppm(files: &[std::path::PathBuf]) -> Result<VideoTensor> {
    let mut data = Vec::new();
    let mut dims = None;
    for path in files {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let (w, h, payload) = seqdir::parse_netpbm(path, &bytes, "P6")?;
        match dims {
            None => dims = Some((w, h)),
            Some(d) if d != (w, h) => return Err(Error::format(path, "inconsistent dimensions")),
            _ => {}
        }
        let need = w * h * 3;
        if payload.len() < need {
            return Err(Error::format(path, "truncated frame"));
        }
        data.extend(payload[..need].iter().map(|&b| b as f32 / 255.0));
    }
    let (w, h) = dims.expect("scan returns at least one frame");
    Ok(VideoTensor::new(files.len(), h, w, data)?)
}

fn read_raw(dir: &Path, files: &[std::path::PathBuf]) -> Result<VideoTensor> {
    let (w, h, n) = seqdir::read_dims(dir)?;
    if n != files.len() {
        let which = files.len().min(n);
        return Err(Error::format(dir, format!("missing frame {which}")));
    }
    let plane = w * h;
    let mut data = vec![0.0f32; n * plane * 3];
    for (f, path) in files.iter().enumerate() {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() < plane * 12 {
            return Err(Error::format(path, "truncated frame"));
        }
        if bytes.len() > plane * 12 {
            return Err(Error::format(path, "inconsistent dimensions"));
        }
        data[f * plane * 3..(f + 1) * plane * 3].copy_from_slice(&decode_raw_frame(&bytes, plane));
    }
    Ok(VideoTensor::new(n, h, w, data)?)
}

pub fn write_frames(v: &VideoTensor, dir: &Path, format: FrameFormat) -> Result<()> {
    seqdir::prepare_output(dir)?;
    if format == FrameFormat::Raw {
        seqdir::write_dims(dir, v.width(), v.height(), v.frames())?;
    }
    for n in 0..v.frames() {
        let path = dir.join(frame_name(n, format.extension()));
        let bytes = match format {
            FrameFormat::Ppm => encode_ppm(v, n),
            FrameFormat::Raw => encode_raw_frame(v.frame(n)),
        };
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn encode_ppm(v: &VideoTensor, n: usize) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", v.width(), v.height()).into_bytes();
    out.extend(v.frame(n).iter().map(|&x| seqdir::quantize(x)));
    out
}

/// One frame as three little-endian `f32` planes, red first.
pub fn encode_raw_frame(frame: &[f32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(frame.len() * 4);
    for c in 0..3 {
        for px in frame.chunks_exact(3) {
            out.extend_from_slice(&px[c].to_le_bytes());
        }
    }
    out
}

/// Inverse of [`encode_raw_frame`] into interleaved RGB.
pub fn decode_raw_frame(bytes: &[u8], pixels: usize) -> Vec<f32> {
    let planes = seqdir::f32s_from_le(bytes);
    let mut out = vec![0.0f32; pixels * 3];
    for c in 0..3 {
        for p in 0..pixels {
            out[p * 3 + c] = planes[c * pixels + p];
        }
    }
    out
}
