//! Frame stacks and per-pixel intensity maps.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Rec.601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

#[inline]
pub fn luma(rgb: [f64; 3]) -> f64 {
    LUMA_WEIGHTS[0] * rgb[0] + LUMA_WEIGHTS[1] * rgb[1] + LUMA_WEIGHTS[2] * rgb[2]
}

/// `frames x height x width x 3` colour samples, interleaved RGB.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoTensor {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl VideoTensor {
    pub fn new(frames: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != frames * height * width * 3 {
            return Err(Error::ShapeMismatch("video buffer length does not match dimensions"));
        }
        Ok(Self {
            frames,
            height,
            width,
            data,
        })
    }

    pub fn filled(frames: usize, height: usize, width: usize, rgb: [f32; 3]) -> Self {
        let mut data = Vec::with_capacity(frames * height * width * 3);
        for _ in 0..frames * height * width {
            data.extend_from_slice(&rgb);
        }
        Self {
            frames,
            height,
            width,
            data,
        }
    }

    #[inline]
    pub fn frames(&self) -> usize {
        self.frames
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn pixels_per_frame(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn frame(&self, n: usize) -> &[f32] {
        let len = self.pixels_per_frame() * 3;
        &self.data[n * len..(n + 1) * len]
    }

    pub fn frame_mut(&mut self, n: usize) -> &mut [f32] {
        let len = self.pixels_per_frame() * 3;
        &mut self.data[n * len..(n + 1) * len]
    }

    #[inline]
    pub fn pixel(&self, n: usize, y: usize, x: usize) -> [f32; 3] {
        let i = ((n * self.height + y) * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn same_shape(&self, other: &VideoTensor) -> bool {
        self.frames == other.frames && self.height == other.height && self.width == other.width
    }

    /// Per-pixel luma of frame `n`, row-major.
    pub fn frame_luma(&self, n: usize) -> Vec<f64> {
        self.frame(n)
            .chunks_exact(3)
            .map(|p| luma([p[0] as f64, p[1] as f64, p[2] as f64]))
            .collect()
    }
}

/// `frames x height x width` enhancement intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl IntensityMap {
    pub fn new(frames: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != frames * height * width {
            return Err(Error::ShapeMismatch("intensity buffer length does not match dimensions"));
        }
        Ok(Self {
            frames,
            height,
            width,
            data,
        })
    }

    pub fn filled(frames: usize, height: usize, width: usize, e: f32) -> Self {
        Self {
            frames,
            height,
            width,
            data: vec![e; frames * height * width],
        }
    }

    #[inline]
    pub fn frames(&self) -> usize {
        self.frames
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn frame(&self, n: usize) -> &[f32] {
        let len = self.height * self.width;
        &self.data[n * len..(n + 1) * len]
    }

    /// True when this map covers every pixel of `v`.
    pub fn matches(&self, v: &VideoTensor) -> bool {
        self.frames == v.frames() && self.height == v.height() && self.width == v.width()
    }
}

/// Intensity maps derivable from the video alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntensityRule {
    Constant(f64),
    /// `e = 1 - luma`, so darker pixels get stronger enhancement.
    Luma,
}

pub fn make_intensity(v: &VideoTensor, rule: IntensityRule) -> Result<IntensityMap> {
    let data = match rule {
        IntensityRule::Constant(c) => {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidConfig("constant intensity must lie in [0, 1]"));
            }
            vec![c as f32; v.frames() * v.pixels_per_frame()]
        }
        IntensityRule::Luma => v
            .data()
            .chunks_exact(3)
            .map(|p| (1.0 - luma([p[0] as f64, p[1] as f64, p[2] as f64])).clamp(0.0, 1.0) as f32)
            .collect(),
    };
    IntensityMap::new(v.frames(), v.height(), v.width(), data)
}
