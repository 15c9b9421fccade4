use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sorted sampling coordinates along one LUT axis, spanning `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
}

impl Grid1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::GridTooSmall(points.len()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::GridNotIncreasing(i + 1));
        }
        if points[0] != 0.0 || points[points.len() - 1] != 1.0 {
            return Err(Error::GridDomain);
        }
        Ok(Self { points })
    }

    /// `len` evenly spaced points `i / (len - 1)`.
    pub fn uniform(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::GridTooSmall(len));
        }
        let last = (len - 1) as f64;
        Ok(Self {
            points: (0..len).map(|i| i as f64 / last).collect(),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    /// Index `c` of the cell `[points[c], points[c + 1]]` holding `v`.
    ///
    /// `v` must already be clamped to `[0, 1]`. A value sitting exactly on an
    /// interior grid point maps to the cell whose lower corner is that point,
    /// and `v == 1` maps to the last cell.
    #[inline]
    pub fn locate_cell(&self, v: f64) -> usize {
        let p = &self.points;
        // Largest c in [0, len - 2] with p[c] <= v; p[0] = 0 <= v always.
        let mut base = 0usize;
        let mut size = p.len() - 1;
        while size > 1 {
            let half = size / 2;
            let mid = base + half;
            base = if p[mid] <= v { mid } else { base };
            size -= half;
        }
        base
    }
}
