//! Reconstruction loss and table regularisers, each with its exact gradient.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fusion::WeightVector;
use crate::lut::{unflatten, Lut};

/// Regulariser weights and the Charbonnier epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub alpha_s: f64,
    pub alpha_m: f64,
    pub charbonnier_eps: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            alpha_s: 1e-4,
            alpha_m: 10.0,
            charbonnier_eps: 1e-3,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_s >= 0.0 && self.alpha_m >= 0.0) {
            return Err(Error::InvalidConfig("regulariser weights must be >= 0"));
        }
        if !(self.charbonnier_eps > 0.0) {
            return Err(Error::InvalidConfig("charbonnier eps must be > 0"));
        }
        Ok(())
    }
}

/// `sqrt(d^2 + eps^2)` and its derivative with respect to `d`.
#[inline]
pub fn charbonnier_term(d: f64, eps: f64) -> (f64, f64) {
    let s = libm::sqrt(d * d + eps * eps);
    (s, d / s)
}

/// Mean Charbonnier penalty over all elements and its gradient wrt `pred`.
pub fn charbonnier(pred: &[f64], gt: &[f64], eps: f64) -> Result<(f64, Vec<f64>)> {
    if pred.len() != gt.len() {
        return Err(Error::ShapeMismatch("charbonnier inputs differ in length"));
    }
    if pred.is_empty() {
        return Ok((0.0, Vec::new()));
    }
    let inv_n = 1.0 / pred.len() as f64;
    let mut sum = 0.0;
    let grad = pred
        .iter()
        .zip(gt)
        .map(|(p, g)| {
            let (v, dv) = charbonnier_term(p - g, eps);
            sum += v;
            dv * inv_n
        })
        .collect();
    Ok((sum * inv_n, grad))
}

/// Visits every (node, forward neighbour) pair along each axis.
fn for_each_forward_pair<const D: usize>(size: usize, mut f: impl FnMut(usize, usize)) {
    let mut strides = [1usize; D];
    for a in (0..D.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * size;
    }
    let nodes = size.pow(D as u32);
    for node in 0..nodes {
        let idx = unflatten::<D>(node, size);
        for a in 0..D {
            if idx[a] + 1 < size {
                f(node, node + strides[a]);
            }
        }
    }
}

/// Sum of squared forward differences of node values along every axis.
pub fn smooth_lut<const D: usize>(lut: &Lut<D>) -> (f64, Vec<f64>) {
    let v = lut.values();
    let mut grad = vec![0.0; v.len()];
    let mut loss = 0.0;
    for_each_forward_pair::<D>(lut.size(), |x, n| {
        for c in 0..3 {
            let d = v[n * 3 + c] - v[x * 3 + c];
            loss += d * d;
            grad[n * 3 + c] += 2.0 * d;
            grad[x * 3 + c] -= 2.0 * d;
        }
    });
    (loss, grad)
}

/// Hinge penalty on every stored channel value that decreases when any input
/// coordinate steps forward. The subgradient is 0 at exact ties.
pub fn mono_lut<const D: usize>(lut: &Lut<D>) -> (f64, Vec<f64>) {
    let v = lut.values();
    let mut grad = vec![0.0; v.len()];
    let mut loss = 0.0;
    for_each_forward_pair::<D>(lut.size(), |x, n| {
        for c in 0..3 {
            let drop = v[x * 3 + c] - v[n * 3 + c];
            if drop > 0.0 {
                loss += drop;
                grad[x * 3 + c] += 1.0;
                grad[n * 3 + c] -= 1.0;
            }
        }
    });
    (loss, grad)
}

/// `sum w_t^2` and `2 w`.
pub fn weight_l2(w: &WeightVector) -> (f64, WeightVector) {
    let loss = w.as_slice().iter().map(|x| x * x).sum();
    (loss, WeightVector(w.as_slice().iter().map(|x| 2.0 * x).collect()))
}

/// Regularised objective `recon + alpha_s (smooth + weights) + alpha_m mono`.
pub fn total_loss(recon: f64, smooth: f64, mono: f64, weights_term: f64, lw: &LossWeights) -> f64 {
    recon + lw.alpha_s * (smooth + weights_term) + lw.alpha_m * mono
}
