//! Video transformation: intensity sourcing, the row-parallel lookup pass,
//! an external denoiser hook and a throughput benchmark.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Instant;

use ialut_core::transform::transform_pixels;
use ialut_core::video::{make_intensity as rule_intensity, IntensityRule};
use ialut_core::{IaLut4, IntensityMap, VideoTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames::{decode_raw_frame, encode_raw_frame};
use crate::intensity::read_intensity;
use crate::seqdir::{dims_text, parse_dims};

#[derive(Debug, Clone, PartialEq)]
pub enum IntensitySource {
    Constant(f64),
    /// `e = 1 - luma`.
    Luma,
    /// Directory holding a stored map.
    File(PathBuf),
}

impl std::str::FromStr for IntensitySource {
    type Err = String;

    /// `constant:C`, `luma` or `file:PATH`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "luma" {
            return Ok(IntensitySource::Luma);
        }
        if let Some(c) = s.strip_prefix("constant:") {
            let c: f64 = c.parse().map_err(|_| format!("bad constant intensity {c:?}"))?;
            if !(0.0..=1.0).contains(&c) {
                return Err(format!("constant intensity {c} outside [0, 1]"));
            }
            return Ok(IntensitySource::Constant(c));
        }
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(IntensitySource::File(PathBuf::from(p)));
        }
        Err(format!("unknown intensity source {s:?} (use constant:C, luma or file:PATH)"))
    }
}

pub fn make_intensity(v: &VideoTensor, src: &IntensitySource) -> Result<IntensityMap> {
    match src {
        IntensitySource::Constant(c) => Ok(rule_intensity(v, IntensityRule::Constant(*c))?),
        IntensitySource::Luma => Ok(rule_intensity(v, IntensityRule::Luma)?),
        IntensitySource::File(path) => {
            let map = read_intensity(path)?;
            if !map.matches(v) {
                return Err(Error::Shape(format!(
                    "intensity map {}x{}x{} does not match video {}x{}x{}",
                    map.frames(),
                    map.height(),
                    map.width(),
                    v.frames(),
                    v.height(),
                    v.width()
                )));
            }
            Ok(map)
        }
    }
}

/// Hardware parallelism, or 1 when it cannot be queried.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Format(format!("cannot start worker pool: {e}")))
}

/// Transforms every pixel through `lut` using `workers` threads. Rows are
/// the unit of work and each pixel is computed independently, so the result
/// does not depend on the worker count.
pub fn transform_video(lut: &IaLut4, v: &VideoTensor, imap: &IntensityMap, workers: usize) -> Result<VideoTensor> {
    transform_in(&worker_pool(workers)?, lut, v, imap)
}

pub fn transform_in(pool: &rayon::ThreadPool, lut: &IaLut4, v: &VideoTensor, imap: &IntensityMap) -> Result<VideoTensor> {
    if !imap.matches(v) {
        return Err(Error::Shape("intensity map does not match video".into()));
    }
    let w = v.width();
    let mut out = vec![0.0f32; v.data().len()];
    if w > 0 {
        pool.install(|| {
            out.par_chunks_mut(w * 3)
                .zip(v.data().par_chunks(w * 3))
                .zip(imap.data().par_chunks(w))
                .try_for_each(|((o, rgb), e)| transform_pixels(lut, rgb, e, o))
        })?;
    }
    Ok(VideoTensor::new(v.frames(), v.height(), v.width(), out)?)
}

/// Runs `plugin` (a shell command) over the clip, or returns a copy when
/// there is none.
///
/// The command receives `W H N` on its first line followed by each frame as
/// raw planar `f32`, and must answer in the same format with the same shape.
pub fn denoise_hook(v: &VideoTensor, plugin: Option<&str>) -> Result<VideoTensor> {
    let Some(cmd) = plugin else {
        return Ok(v.clone());
    };
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| Error::Denoiser(format!("cannot start {cmd:?}: {e}")))?;

    let mut payload = dims_text(v.width(), v.height(), v.frames()).into_bytes();
    for n in 0..v.frames() {
        payload.extend(encode_raw_frame(v.frame(n)));
    }
    let mut stdin = child.stdin.take().expect("piped stdin");
    // A plugin may exit without draining its input; that surfaces through
    // its status or its output, not as a write error here.
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(&payload);
    });
    let mut stdout = Vec::new();
    let mut stderr = String::new();
    let read = child.stdout.take().expect("piped stdout").read_to_end(&mut stdout);
    let _ = child.stderr.take().expect("piped stderr").read_to_string(&mut stderr);
    let status = child.wait().map_err(|e| Error::Denoiser(e.to_string()))?;
    let _ = writer.join();
    read.map_err(|e| Error::Denoiser(e.to_string()))?;
    if !status.success() {
        return Err(Error::Denoiser(format!("{cmd:?} exited with {status}: {}", stderr.trim())));
    }

    let mismatch = || Error::Shape("denoiser shape mismatch".into());
    let nl = stdout.iter().position(|&b| b == b'\n').ok_or_else(mismatch)?;
    let dims = std::str::from_utf8(&stdout[..nl]).ok().and_then(parse_dims);
    if dims != Some((v.width(), v.height(), v.frames())) {
        return Err(mismatch());
    }
    let body = &stdout[nl + 1..];
    let frame_bytes = v.pixels_per_frame() * 12;
    if body.len() != frame_bytes * v.frames() {
        return Err(mismatch());
    }
    let mut data = Vec::with_capacity(v.data().len());
    if frame_bytes > 0 {
        for chunk in body.chunks_exact(frame_bytes) {
            data.extend(decode_raw_frame(chunk, v.pixels_per_frame()));
        }
    }
    Ok(VideoTensor::new(v.frames(), v.height(), v.width(), data)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub workers: usize,
    pub secs_per_frame: f64,
    pub fps: f64,
}

impl std::fmt::Display for ThroughputReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "resolution={}x{} frames={} workers={} secs_per_frame={:.6} fps={:.3}",
            self.width, self.height, self.frames, self.workers, self.secs_per_frame, self.fps
        )
    }
}

/// Times the transform of a random clip through a random 33-point table,
/// excluding data generation, intensity computation and pool start-up.
pub fn bench_transform(width: usize, height: usize, frames: usize, workers: usize, seed: u64) -> Result<ThroughputReport> {
    if width == 0 || height == 0 || frames == 0 {
        return Err(Error::Shape("benchmark needs a non-empty clip".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lut = IaLut4::random(33, &mut rng)?;
    let data: Vec<f32> = (0..width * height * 3).map(|_| rng.random()).collect();
    let frame = VideoTensor::new(1, height, width, data)?;
    let imap = rule_intensity(&frame, IntensityRule::Luma)?;
    let pool = worker_pool(workers)?;
    transform_in(&pool, &lut, &frame, &imap)?;
    let start = Instant::now();
    for _ in 0..frames {
        std::hint::black_box(transform_in(&pool, &lut, &frame, &imap)?);
    }
    let secs = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    Ok(ThroughputReport {
        width,
        height,
        frames,
        workers: pool.current_num_threads(),
        secs_per_frame: secs / frames as f64,
        fps: frames as f64 / secs,
    })
}
