//! Fidelity and inter-frame brightness-consistency metrics.
//!
//! Brightness is the mean Rec.601 luma of a frame ("AB"). The consistency
//! scores [`ab_var`] and [`mabd`] are multiplied by [`CONSISTENCY_SCALE`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::video::VideoTensor;

/// Reported PSNR for identical inputs, and the upper bound of all reports.
pub const PSNR_CAP_DB: f64 = 99.0;
pub const CONSISTENCY_SCALE: f64 = 1e3;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn check_shapes(a: &VideoTensor, b: &VideoTensor) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch("videos differ in shape"));
    }
    Ok(())
}

pub fn mse(a: &VideoTensor, b: &VideoTensor) -> Result<f64> {
    check_shapes(a, b)?;
    if a.data().is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / a.data().len() as f64)
}

/// Peak signal-to-noise ratio for unit dynamic range, capped at 99 dB.
pub fn psnr(a: &VideoTensor, b: &VideoTensor) -> Result<f64> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * libm::log10(1.0 / m)).min(PSNR_CAP_DB))
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let x = i as f64 - half;
        *v = libm::exp(-(x * x) / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Separable "valid" Gaussian filtering of a row-major plane.
fn filter_valid(plane: &[f64], h: usize, w: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut rows = Vec::with_capacity(h * ow);
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            rows.push(row[x..x + SSIM_WINDOW].iter().zip(k).map(|(a, b)| a * b).sum::<f64>());
        }
    }
    let mut out = Vec::with_capacity(oh * ow);
    for y in 0..oh {
        for x in 0..ow {
            let mut s = 0.0;
            for (i, kv) in k.iter().enumerate() {
                s += rows[(y + i) * ow + x] * kv;
            }
            out.push(s);
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], h: usize, w: usize, k: &[f64; SSIM_WINDOW]) -> f64 {
    let c1 = (SSIM_K1 * 1.0) * (SSIM_K1 * 1.0);
    let c2 = (SSIM_K2 * 1.0) * (SSIM_K2 * 1.0);
    let aa: Vec<f64> = a.iter().map(|x| x * x).collect();
    let bb: Vec<f64> = b.iter().map(|x| x * x).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mu_a = filter_valid(a, h, w, k);
    let mu_b = filter_valid(b, h, w, k);
    let e_aa = filter_valid(&aa, h, w, k);
    let e_bb = filter_valid(&bb, h, w, k);
    let e_ab = filter_valid(&ab, h, w, k);
    let mut sum = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    sum / mu_a.len() as f64
}

/// Mean local SSIM of the luma planes (11x11 Gaussian window, sigma 1.5),
/// averaged over frames.
pub fn ssim(a: &VideoTensor, b: &VideoTensor) -> Result<f64> {
    check_shapes(a, b)?;
    let (h, w) = (a.height(), a.width());
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::FrameTooSmall {
            height: h,
            width: w,
            window: SSIM_WINDOW,
        });
    }
    if a.frames() == 0 {
        return Err(Error::TooFewFrames { needed: 1, got: 0 });
    }
    let k = gaussian_window();
    let total: f64 = (0..a.frames())
        .map(|n| ssim_plane(&a.frame_luma(n), &b.frame_luma(n), h, w, &k))
        .sum();
    Ok(total / a.frames() as f64)
}

/// Per-frame mean luma.
pub fn ab_series(v: &VideoTensor) -> Vec<f64> {
    (0..v.frames())
        .map(|n| {
            let l = v.frame_luma(n);
            if l.is_empty() {
                0.0
            } else {
                l.iter().sum::<f64>() / l.len() as f64
            }
        })
        .collect()
}

fn paired_series(pred: &VideoTensor, gt: &VideoTensor) -> Result<(Vec<f64>, Vec<f64>)> {
    if pred.frames() != gt.frames() {
        return Err(Error::ShapeMismatch("videos differ in frame count"));
    }
    if pred.frames() < 2 {
        return Err(Error::TooFewFrames {
            needed: 2,
            got: pred.frames(),
        });
    }
    Ok((ab_series(pred), ab_series(gt)))
}

/// Population variance over frames of `AB_pred - AB_gt`, scaled.
pub fn ab_var(pred: &VideoTensor, gt: &VideoTensor) -> Result<f64> {
    let (p, g) = paired_series(pred, gt)?;
    Ok(ab_var_from_series(&p, &g) * CONSISTENCY_SCALE)
}

pub(crate) fn ab_var_from_series(p: &[f64], g: &[f64]) -> f64 {
    let n = p.len() as f64;
    // Shifted by the first difference so a constant series is exactly 0.
    let d0 = p[0] - g[0];
    let diffs: Vec<f64> = p.iter().zip(g).map(|(a, b)| (a - b) - d0).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n
}

/// Mean absolute difference between the frame-to-frame brightness changes of
/// `pred` and `gt`, scaled.
pub fn mabd(pred: &VideoTensor, gt: &VideoTensor) -> Result<f64> {
    let (p, g) = paired_series(pred, gt)?;
    Ok(mabd_from_series(&p, &g) * CONSISTENCY_SCALE)
}

pub(crate) fn mabd_from_series(p: &[f64], g: &[f64]) -> f64 {
    let n = p.len() - 1;
    (0..n)
        .map(|i| ((p[i + 1] - p[i]) - (g[i + 1] - g[i])).abs())
        .sum::<f64>()
        / n as f64
}

/// Mean over videos of `|AB(pair_index + 1) - AB(pair_index)|`.
pub fn md_ab(videos: &[VideoTensor], pair_index: usize) -> Result<f64> {
    if videos.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut sum = 0.0;
    for v in videos {
        if v.frames() <= pair_index + 1 {
            return Err(Error::PairIndexOutOfRange {
                index: pair_index,
                frames: v.frames(),
            });
        }
        let ab = ab_series(v);
        sum += (ab[pair_index + 1] - ab[pair_index]).abs();
    }
    Ok(sum / videos.len() as f64)
}
