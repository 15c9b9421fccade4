//! The per-pixel lookup + interpolation kernel.
//!
//! Every output pixel depends only on its own `(r, g, b, e)` tuple, so any
//! partition of the pixel range produces identical results.

use crate::error::{Error, Result};
use crate::lut::IaLut4;
use crate::video::{IntensityMap, VideoTensor};

/// Transforms a run of interleaved RGB pixels with their intensities.
pub fn transform_pixels(lut: &IaLut4, rgb: &[f32], e: &[f32], out: &mut [f32]) -> Result<()> {
    if rgb.len() != e.len() * 3 || out.len() != rgb.len() {
        return Err(Error::ShapeMismatch("pixel, intensity and output runs differ"));
    }
    for ((px, &ei), o) in rgb.chunks_exact(3).zip(e).zip(out.chunks_exact_mut(3)) {
        let v = lut.apply([px[0] as f64, px[1] as f64, px[2] as f64, ei as f64])?;
        o[0] = v[0] as f32;
        o[1] = v[1] as f32;
        o[2] = v[2] as f32;
    }
    Ok(())
}

/// Single-threaded whole-video transform.
pub fn transform_video(lut: &IaLut4, v: &VideoTensor, imap: &IntensityMap) -> Result<VideoTensor> {
    if !imap.matches(v) {
        return Err(Error::ShapeMismatch("intensity map does not match video"));
    }
    let mut out = alloc::vec![0.0f32; v.data().len()];
    transform_pixels(lut, v.data(), imap.data(), &mut out)?;
    VideoTensor::new(v.frames(), v.height(), v.width(), out)
}
