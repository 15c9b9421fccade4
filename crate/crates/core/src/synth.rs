//! Synthetic clips where one input colour must map to two different outputs.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::video::{IntensityMap, VideoTensor};

/// A uniformly coloured low-light clip whose ground truth is `target_a` on
/// the left half and `target_b` on the right half. The matching intensity map
/// is 0 on the left and 1 on the right, which disambiguates the two targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneToMany {
    pub height: usize,
    pub width: usize,
    pub frames: usize,
    pub input: [f64; 3],
    pub target_a: [f64; 3],
    pub target_b: [f64; 3],
    /// Half-width of uniform noise added to the low clip; 0 disables it.
    pub noise: f64,
    pub seed: u64,
}

impl OneToMany {
    /// The standard clip: grey 0.1 input, grey targets 0.3 and 0.8.
    pub fn standard(height: usize, width: usize, frames: usize) -> Self {
        Self {
            height,
            width,
            frames,
            input: [0.1; 3],
            target_a: [0.3; 3],
            target_b: [0.8; 3],
            noise: 0.0,
            seed: 0,
        }
    }

    /// Per-channel MSE floor of any table that ignores intensity, reached by
    /// outputting the midpoint of the two targets (even widths only).
    pub fn rgb_only_mse_floor(&self) -> [f64; 3] {
        core::array::from_fn(|c| {
            let half = (self.target_b[c] - self.target_a[c]) / 2.0;
            half * half
        })
    }

    pub fn generate(&self) -> Result<(VideoTensor, VideoTensor, IntensityMap)> {
        if self.height == 0 || self.width == 0 || self.frames == 0 {
            return Err(Error::EmptyFrame);
        }
        let in_range = |c: &[f64; 3]| c.iter().all(|v| (0.0..=1.0).contains(v));
        if !(in_range(&self.input) && in_range(&self.target_a) && in_range(&self.target_b)) {
            return Err(Error::InvalidConfig("colours must lie in [0, 1]"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let pixels = self.frames * self.height * self.width;
        let mut low = Vec::with_capacity(pixels * 3);
        let mut gt = Vec::with_capacity(pixels * 3);
        let mut imap = Vec::with_capacity(pixels);
        for _ in 0..self.frames {
            for _ in 0..self.height {
                for x in 0..self.width {
                    let left = x < self.width / 2;
                    for c in 0..3 {
                        let mut v = self.input[c];
                        if self.noise > 0.0 {
                            v = (v + rng.random_range(-self.noise..=self.noise)).clamp(0.0, 1.0);
                        }
                        low.push(v as f32);
                        gt.push(if left { self.target_a[c] } else { self.target_b[c] } as f32);
                    }
                    imap.push(if left { 0.0 } else { 1.0 });
                }
            }
        }
        Ok((
            VideoTensor::new(self.frames, self.height, self.width, low)?,
            VideoTensor::new(self.frames, self.height, self.width, gt)?,
            IntensityMap::new(self.frames, self.height, self.width, imap)?,
        ))
    }
}

/// [`OneToMany::generate`] without noise.
pub fn gen_one_to_many(
    height: usize,
    width: usize,
    frames: usize,
    input: [f64; 3],
    target_a: [f64; 3],
    target_b: [f64; 3],
    seed: u64,
) -> Result<(VideoTensor, VideoTensor, IntensityMap)> {
    OneToMany {
        height,
        width,
        frames,
        input,
        target_a,
        target_b,
        noise: 0.0,
        seed,
    }
    .generate()
}
