//! Adam and cosine-annealed learning rates.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Moment accumulators for one parameter array.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
///
/// A non-finite gradient leaves both `params` and `state` untouched.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, lr: f64) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::ShapeMismatch("adam parameter/gradient/state lengths differ"));
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient {
            step: state.step as usize,
        });
    }
    state.step += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let t = state.step as i32;
    let c1 = 1.0 - libm::pow(b1, t as f64);
    let c2 = 1.0 - libm::pow(b2, t as f64);
    for ((p, &g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (libm::sqrt(v_hat) + state.eps);
    }
    Ok(())
}

/// Cosine annealing from `lr0` at `step = 0` to `lr_min` at `step = total`.
pub fn cosine_lr(step: usize, total_steps: usize, lr0: f64, lr_min: f64) -> f64 {
    if total_steps == 0 {
        return lr0;
    }
    let t = step.min(total_steps) as f64 / total_steps as f64;
    lr_min + 0.5 * (lr0 - lr_min) * (1.0 + libm::cos(core::f64::consts::PI * t))
}

/// Cosine schedule over `total_steps`, optionally split into equal cycles
/// that each restart at `lr0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineSchedule {
    pub total_steps: usize,
    pub restarts: usize,
    pub lr0: f64,
    pub lr_min: f64,
}

impl CosineSchedule {
    pub fn lr(&self, step: usize) -> f64 {
        let cycles = self.restarts + 1;
        let cycle_len = self.total_steps.div_ceil(cycles).max(1);
        let local = step % cycle_len;
        // The final step of a run lands exactly on the floor.
        let local = if step >= self.total_steps { cycle_len } else { local };
        cosine_lr(local, cycle_len, self.lr0, self.lr_min)
    }
}
