//! Gradient-based fitting of basis tables, per-clip fusion weights and
//! (optionally) free per-pixel intensities to paired low/normal-light clips.
//!
//! Forward pass per clip: fuse the basis with the clip's weights, assemble
//! `(r, g, b, e)` per pixel, interpolate, and compare against ground truth
//! with the Charbonnier loss. Regularisers act on the fused table. The
//! backward pass is exact: corner coefficients route the output gradient
//! into the fused values, fusion is linear so each basis receives the fused
//! gradient scaled by its weight, and each weight receives the inner product
//! of the fused gradient with its basis.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fusion::{init_basis, BasisLutSet, WeightVector};
use crate::losses::{charbonnier_term, mono_lut, smooth_lut, total_loss, LossWeights};
use crate::lut::Lut;
use crate::optim::{adam_step, AdamState, CosineSchedule};
use crate::video::{luma, IntensityMap, VideoTensor};

/// Where the fourth table coordinate comes from during fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntensityMode {
    Constant(f64),
    /// `1 - luma` of the low-light pixel.
    Luma,
    /// Maps supplied with each clip.
    Provided,
    /// Per-pixel values optimised jointly, initialised from `Luma`.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub grid_size: usize,
    pub basis_count: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub lr_min: f64,
    /// Number of cosine restarts over the whole run.
    pub restarts: usize,
    pub loss: LossWeights,
    pub intensity: IntensityMode,
    /// Fit an RGB-only table instead of the intensity-aware one.
    pub fit_3d: bool,
    pub seed: u64,
    /// Trailing frames of every clip kept out of training and used for the
    /// final PSNR.
    pub holdout_frames: usize,
    pub divergence_threshold: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            grid_size: 33,
            basis_count: 3,
            epochs: 100,
            batch_size: 8,
            lr: 4e-4,
            lr_min: 1e-7,
            restarts: 0,
            loss: LossWeights::default(),
            intensity: IntensityMode::Luma,
            fit_3d: false,
            seed: 0,
            holdout_frames: 0,
            divergence_threshold: 1e6,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::GridTooSmall(self.grid_size));
        }
        if self.basis_count == 0 {
            return Err(Error::InvalidConfig("basis count must be >= 1"));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be >= 1"));
        }
        if !(self.lr_min > 0.0 && self.lr_min <= self.lr) {
            return Err(Error::InvalidConfig("need 0 < min lr <= initial lr"));
        }
        if let IntensityMode::Constant(c) = self.intensity {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidConfig("constant intensity must lie in [0, 1]"));
            }
        }
        self.loss.validate()
    }
}

/// One paired training clip.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    pub low: VideoTensor,
    pub gt: VideoTensor,
    pub intensity: Option<IntensityMap>,
}

/// Frame `frame` of clip `clip`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameRef {
    pub clip: usize,
    pub frame: usize,
}

/// Loss components of one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub recon: f64,
    pub smooth: f64,
    pub mono: f64,
    pub weights: f64,
}

impl LossBreakdown {
    /// Weighted regulariser share of `total`.
    pub fn regularizer(&self) -> f64 {
        self.total - self.recon
    }
}

/// Everything the optimiser updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<const D: usize> {
    pub basis: BasisLutSet<D>,
    /// One weight vector per clip.
    pub weights: Vec<WeightVector>,
    /// Per-clip free intensities (row-major per frame); empty unless the
    /// mode is [`IntensityMode::Free`].
    pub intensities: Vec<Vec<f64>>,
}

/// Gradients shaped like [`Params`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grads {
    pub basis: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    pub intensities: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub lr: f64,
    pub total: f64,
    pub recon: f64,
    pub regularizer: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitReport {
    pub epochs: Vec<EpochStats>,
    pub steps: usize,
    /// PSNR of the exported (clamped) tables on the evaluation frames.
    pub final_psnr: f64,
    pub final_mse: f64,
    pub final_channel_mse: [f64; 3],
    /// True when `final_*` were measured on held-out frames.
    pub held_out: bool,
    /// Filled in by callers that own a clock.
    pub wall_clock_secs: Option<f64>,
}

impl FitReport {
    /// One whitespace-separated line per epoch, preceded by a header.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# epoch lr total recon regularizer\n");
        for e in &self.epochs {
            s.push_str(&format!(
                "{} {:.9e} {:.9e} {:.9e} {:.9e}\n",
                e.epoch, e.lr, e.total, e.recon, e.regularizer
            ));
        }
        s.push_str(&format!(
            "# steps={} final_psnr={:.6} final_mse={:.9e} held_out={}\n",
            self.steps, self.final_psnr, self.final_mse, self.held_out
        ));
        s
    }
}

/// A failed fit together with the progress made before it stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct FitAbort {
    pub error: Error,
    pub report: FitReport,
}

impl From<Error> for FitAbort {
    fn from(error: Error) -> Self {
        Self {
            error,
            report: FitReport::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome<const D: usize> {
    pub basis: BasisLutSet<D>,
    pub weights: Vec<WeightVector>,
    /// Fitted maps, present only in free-intensity mode.
    pub intensities: Option<Vec<IntensityMap>>,
    pub report: FitReport,
}

impl<const D: usize> FitOutcome<D> {
    /// Fused, clamped table for clip `clip`.
    pub fn export_lut(&self, clip: usize) -> Result<Lut<D>> {
        let mut lut = self.basis.fuse(&self.weights[clip])?;
        lut.clamp_values();
        Ok(lut)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fitted {
    Ia(FitOutcome<4>),
    Tri(FitOutcome<3>),
}

#[inline]
fn assemble<const D: usize>(rgb: [f64; 3], e: f64) -> [f64; D] {
    core::array::from_fn(|a| if a < 3 { rgb[a] } else { e })
}

/// The training objective over a fixed set of clips.
pub struct Objective<'a, const D: usize> {
    clips: &'a [Clip],
    cfg: &'a FitConfig,
}

impl<'a, const D: usize> Objective<'a, D> {
    pub fn new(clips: &'a [Clip], cfg: &'a FitConfig) -> Result<Self> {
        cfg.validate()?;
        if clips.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for c in clips {
            if !c.low.same_shape(&c.gt) {
                return Err(Error::ShapeMismatch("low and ground-truth clips differ in shape"));
            }
            if c.low.frames() == 0 || c.low.pixels_per_frame() == 0 {
                return Err(Error::EmptyFrame);
            }
            if c.low.frames() <= cfg.holdout_frames {
                return Err(Error::InvalidConfig("hold-out leaves no training frames"));
            }
            if D == 4 && cfg.intensity == IntensityMode::Provided {
                match &c.intensity {
                    Some(m) if m.matches(&c.low) => {}
                    Some(_) => return Err(Error::ShapeMismatch("intensity map does not match clip")),
                    None => return Err(Error::InvalidConfig("provided mode needs intensity maps")),
                }
            }
        }
        Ok(Self { clips, cfg })
    }

    fn free_intensity(&self) -> bool {
        D == 4 && self.cfg.intensity == IntensityMode::Free
    }

    /// Identity-initialised basis, one-hot weights, luma-initialised free
    /// intensities.
    pub fn init_params(&self) -> Result<Params<D>> {
        let (basis, w) = init_basis::<D>(self.cfg.basis_count, self.cfg.grid_size)?;
        let intensities = if self.free_intensity() {
            self.clips
                .iter()
                .map(|c| {
                    c.low
                        .data()
                        .chunks_exact(3)
                        .map(|p| (1.0 - luma([p[0] as f64, p[1] as f64, p[2] as f64])).clamp(0.0, 1.0))
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Params {
            basis,
            weights: vec![w; self.clips.len()],
            intensities,
        })
    }

    /// Training frames (hold-out excluded), in clip-major order.
    pub fn train_frames(&self) -> Vec<FrameRef> {
        self.frames(0, self.cfg.holdout_frames)
    }

    pub fn holdout_frames(&self) -> Vec<FrameRef> {
        let mut out = Vec::new();
        for (ci, c) in self.clips.iter().enumerate() {
            for f in c.low.frames() - self.cfg.holdout_frames..c.low.frames() {
                out.push(FrameRef { clip: ci, frame: f });
            }
        }
        out
    }

    fn frames(&self, skip_front: usize, skip_back: usize) -> Vec<FrameRef> {
        let mut out = Vec::new();
        for (ci, c) in self.clips.iter().enumerate() {
            for f in skip_front..c.low.frames() - skip_back {
                out.push(FrameRef { clip: ci, frame: f });
            }
        }
        out
    }

    /// Every frame of every clip.
    pub fn all_frames(&self) -> Vec<FrameRef> {
        self.frames(0, 0)
    }

    #[inline]
    fn intensity(&self, params: &Params<D>, clip: usize, pixel: usize, rgb: [f64; 3]) -> f64 {
        if D < 4 {
            return 0.0;
        }
        match self.cfg.intensity {
            IntensityMode::Constant(c) => c,
            IntensityMode::Luma => (1.0 - luma(rgb)).clamp(0.0, 1.0),
            IntensityMode::Provided => self.clips[clip]
                .intensity
                .as_ref()
                .map_or(0.0, |m| m.data()[pixel] as f64),
            IntensityMode::Free => params.intensities[clip][pixel],
        }
    }

    /// Loss over `frames`, with gradients when `with_grad` is set.
    ///
    /// Reconstruction is the mean over all batch elements; regularisers are
    /// averaged over the distinct clips present in the batch.
    pub fn evaluate(
        &self,
        params: &Params<D>,
        frames: &[FrameRef],
        with_grad: bool,
    ) -> Result<(LossBreakdown, Option<Grads>)> {
        if frames.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let lw = &self.cfg.loss;
        let mut present: Vec<usize> = frames.iter().map(|f| f.clip).collect();
        present.sort_unstable();
        present.dedup();
        let fused: Vec<Lut<D>> = present
            .iter()
            .map(|&c| params.basis.fuse(&params.weights[c]))
            .collect::<Result<_>>()?;
        let slot = |clip: usize| present.binary_search(&clip).unwrap_or(0);

        let n_elems: usize = frames
            .iter()
            .map(|f| self.clips[f.clip].low.pixels_per_frame() * 3)
            .sum();
        let inv_n = 1.0 / n_elems as f64;
        let eps = lw.charbonnier_eps;

        let value_len = params.basis.basis_values(0).len();
        let mut g_fused: Vec<Vec<f64>> = if with_grad {
            vec![vec![0.0; value_len]; present.len()]
        } else {
            Vec::new()
        };
        let mut g_int: Vec<Vec<f64>> = if with_grad && self.free_intensity() {
            params.intensities.iter().map(|v| vec![0.0; v.len()]).collect()
        } else {
            Vec::new()
        };

        let mut recon_sum = 0.0;
        for f in frames {
            let clip = &self.clips[f.clip];
            let s = slot(f.clip);
            let lut = &fused[s];
            let ppf = clip.low.pixels_per_frame();
            let low = clip.low.frame(f.frame);
            let gt = clip.gt.frame(f.frame);
            for p in 0..ppf {
                let rgb = [low[p * 3] as f64, low[p * 3 + 1] as f64, low[p * 3 + 2] as f64];
                let pixel = f.frame * ppf + p;
                let e = self.intensity(params, f.clip, pixel, rgb);
                let pt = assemble::<D>(rgb, e);
                let ag = lut.apply_grad(pt)?;
                let mut g_out = [0.0; 3];
                for c in 0..3 {
                    let (v, dv) = charbonnier_term(ag.output[c] - gt[p * 3 + c] as f64, eps);
                    recon_sum += v;
                    g_out[c] = dv * inv_n;
                }
                if with_grad {
                    let gf = &mut g_fused[s];
                    for (node, w) in ag.d_values.iter() {
                        gf[node * 3] += w * g_out[0];
                        gf[node * 3 + 1] += w * g_out[1];
                        gf[node * 3 + 2] += w * g_out[2];
                    }
                    if !g_int.is_empty() {
                        if let Some(de) = ag.d_point.get(3) {
                            g_int[f.clip][pixel] += de[0] * g_out[0] + de[1] * g_out[1] + de[2] * g_out[2];
                        }
                    }
                }
            }
        }
        let recon = recon_sum * inv_n;

        let k = present.len() as f64;
        let (mut smooth, mut mono, mut wterm) = (0.0, 0.0, 0.0);
        for (s, &c) in present.iter().enumerate() {
            let (sl, sg) = smooth_lut(&fused[s]);
            let (ml, mg) = mono_lut(&fused[s]);
            smooth += sl / k;
            mono += ml / k;
            wterm += params.weights[c].as_slice().iter().map(|x| x * x).sum::<f64>() / k;
            if with_grad {
                for ((g, a), b) in g_fused[s].iter_mut().zip(&sg).zip(&mg) {
                    *g += (lw.alpha_s * a + lw.alpha_m * b) / k;
                }
            }
        }
        let total = total_loss(recon, smooth, mono, wterm, lw);
        let breakdown = LossBreakdown {
            total,
            recon,
            smooth,
            mono,
            weights: wterm,
        };
        if !with_grad {
            return Ok((breakdown, None));
        }

        let t_count = params.basis.count();
        let mut g_basis = vec![vec![0.0; value_len]; t_count];
        let mut g_w = vec![vec![0.0; t_count]; self.clips.len()];
        for (s, &c) in present.iter().enumerate() {
            let w = params.weights[c].as_slice();
            for t in 0..t_count {
                let bv = params.basis.basis_values(t);
                let mut dot = 0.0;
                for ((gb, &gf), &b) in g_basis[t].iter_mut().zip(&g_fused[s]).zip(bv) {
                    *gb += w[t] * gf;
                    dot += gf * b;
                }
                g_w[c][t] = dot + lw.alpha_s * 2.0 * w[t] / k;
            }
        }
        Ok((
            breakdown,
            Some(Grads {
                basis: g_basis,
                weights: g_w,
                intensities: g_int,
            }),
        ))
    }

    /// Exported-table outputs on `frames`: mean squared error overall and
    /// per channel.
    pub fn export_error(&self, params: &Params<D>, frames: &[FrameRef]) -> Result<(f64, [f64; 3])> {
        let mut luts = Vec::with_capacity(self.clips.len());
        for w in &params.weights {
            let mut l = params.basis.fuse(w)?;
            l.clamp_values();
            luts.push(l);
        }
        let mut sums = [0.0; 3];
        let mut count = 0usize;
        for f in frames {
            let clip = &self.clips[f.clip];
            let ppf = clip.low.pixels_per_frame();
            let low = clip.low.frame(f.frame);
            let gt = clip.gt.frame(f.frame);
            for p in 0..ppf {
                let rgb = [low[p * 3] as f64, low[p * 3 + 1] as f64, low[p * 3 + 2] as f64];
                let e = self.intensity(params, f.clip, f.frame * ppf + p, rgb);
                let out = luts[f.clip].apply(assemble::<D>(rgb, e))?;
                for c in 0..3 {
                    // Output frames are stored in single precision.
                    let d = (out[c] as f32) as f64 - gt[p * 3 + c] as f64;
                    sums[c] += d * d;
                }
                count += 1;
            }
        }
        let per = sums.map(|s| s / count.max(1) as f64);
        Ok(((per[0] + per[1] + per[2]) / 3.0, per))
    }
}

/// Fits a `D`-dimensional table set to `clips`.
pub fn fit_tables<const D: usize>(clips: &[Clip], cfg: &FitConfig) -> core::result::Result<FitOutcome<D>, FitAbort> {
    let obj = Objective::<D>::new(clips, cfg)?;
    let mut params = obj.init_params()?;
    let train = obj.train_frames();
    let batches_per_epoch = train.len().div_ceil(cfg.batch_size);
    let total_steps = cfg.epochs * batches_per_epoch;
    let schedule = CosineSchedule {
        total_steps,
        restarts: cfg.restarts,
        lr0: cfg.lr,
        lr_min: cfg.lr_min,
    };

    let value_len = params.basis.basis_values(0).len();
    let mut basis_state: Vec<AdamState> = (0..params.basis.count()).map(|_| AdamState::new(value_len)).collect();
    let mut weight_state: Vec<AdamState> = params.weights.iter().map(|w| AdamState::new(w.len())).collect();
    let mut int_state: Vec<AdamState> = params.intensities.iter().map(|v| AdamState::new(v.len())).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = FitReport::default();
    let mut order = train.clone();
    let mut step = 0usize;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut acc = LossBreakdown::default();
        let mut lr = cfg.lr;
        for batch in order.chunks(cfg.batch_size) {
            lr = schedule.lr(step);
            let (loss, grads) = match obj.evaluate(&params, batch, true) {
                Ok(v) => v,
                Err(error) => return Err(FitAbort { error, report }),
            };
            let grads = grads.expect("gradients requested");
            let update = (|| -> Result<()> {
                for t in 0..params.basis.count() {
                    adam_step(params.basis.basis_values_mut(t), &grads.basis[t], &mut basis_state[t], lr)?;
                }
                for (c, w) in params.weights.iter_mut().enumerate() {
                    adam_step(&mut w.0, &grads.weights[c], &mut weight_state[c], lr)?;
                }
                for (c, v) in params.intensities.iter_mut().enumerate() {
                    adam_step(v, &grads.intensities[c], &mut int_state[c], lr)?;
                    v.iter_mut().for_each(|e| *e = e.clamp(0.0, 1.0));
                }
                Ok(())
            })();
            if let Err(error) = update {
                let error = match error {
                    Error::NonFiniteGradient { .. } => Error::NonFiniteGradient { step },
                    e => e,
                };
                return Err(FitAbort { error, report });
            }
            step += 1;
            let scale = batch.len() as f64 / train.len() as f64;
            acc.total += loss.total * scale;
            acc.recon += loss.recon * scale;
        }
        report.epochs.push(EpochStats {
            epoch,
            lr,
            total: acc.total,
            recon: acc.recon,
            regularizer: acc.total - acc.recon,
        });
        report.steps = step;
        if !acc.total.is_finite() || acc.total > cfg.divergence_threshold {
            return Err(FitAbort {
                error: Error::Diverged {
                    epoch,
                    loss: acc.total,
                },
                report,
            });
        }
    }

    let (eval, held_out) = if cfg.holdout_frames > 0 {
        (obj.holdout_frames(), true)
    } else {
        (train, false)
    };
    let (mse, per) = match obj.export_error(&params, &eval) {
        Ok(v) => v,
        Err(error) => return Err(FitAbort { error, report }),
    };
    report.final_mse = mse;
    report.final_channel_mse = per;
    report.final_psnr = if mse == 0.0 {
        crate::metrics::PSNR_CAP_DB
    } else {
        (10.0 * libm::log10(1.0 / mse)).min(crate::metrics::PSNR_CAP_DB)
    };
    report.held_out = held_out;

    let intensities = if obj.free_intensity() {
        let maps = clips
            .iter()
            .zip(&params.intensities)
            .map(|(c, v)| {
                IntensityMap::new(
                    c.low.frames(),
                    c.low.height(),
                    c.low.width(),
                    v.iter().map(|&e| e as f32).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Some(maps)
    } else {
        None
    };
    Ok(FitOutcome {
        basis: params.basis,
        weights: params.weights,
        intensities,
        report,
    })
}

/// Fits the table kind selected by `cfg.fit_3d`.
pub fn fit(clips: &[Clip], cfg: &FitConfig) -> core::result::Result<Fitted, FitAbort> {
    if cfg.fit_3d {
        fit_tables::<3>(clips, cfg).map(Fitted::Tri)
    } else {
        fit_tables::<4>(clips, cfg).map(Fitted::Ia)
    }
}
