//! Basis tables and their weighted fusion into one clip-adaptive table.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::lut::{zero_values, Lut};

/// Per-clip fusion weights, one per basis table. Unconstrained in range.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    /// `(1, 0, ..., 0)`.
    pub fn one_hot(len: usize, hot: usize) -> Self {
        let mut w = alloc::vec![0.0; len];
        w[hot] = 1.0;
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `T` tables sharing one set of grids.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisLutSet<const D: usize> {
    grids: [Grid1D; D],
    basis: Vec<Vec<f64>>,
}

pub type BasisIaLutSet = BasisLutSet<4>;

impl<const D: usize> BasisLutSet<D> {
    /// Collects tables into a set; all must share the same grids.
    pub fn from_luts(luts: Vec<Lut<D>>) -> Result<Self> {
        let first = luts.first().ok_or(Error::InvalidConfig("basis count must be >= 1"))?;
        let grids = first.grids().clone();
        if luts.iter().any(|l| *l.grids() != grids) {
            return Err(Error::ShapeMismatch("basis tables use different grids"));
        }
        let basis = luts.into_iter().map(|l| l.values().to_vec()).collect();
        Ok(Self { grids, basis })
    }

    pub fn count(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.grids[0].len()
    }

    pub fn grids(&self) -> &[Grid1D; D] {
        &self.grids
    }

    pub fn basis_values(&self, t: usize) -> &[f64] {
        &self.basis[t]
    }

    pub fn basis_values_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.basis[t]
    }

    /// Basis `t` as a standalone table.
    pub fn basis(&self, t: usize) -> Result<Lut<D>> {
        Lut::new(self.grids.clone(), self.basis[t].clone())
    }

    /// Number of stored basis values, `T * 3 * L^D`.
    pub fn parameter_count(&self) -> usize {
        self.basis.iter().map(Vec::len).sum()
    }

    /// Elementwise `sum_t w_t * basis_t`. The result is not clamped.
    pub fn fuse(&self, w: &WeightVector) -> Result<Lut<D>> {
        let mut out = Lut::new(self.grids.clone(), zero_values(self.size(), D))?;
        self.fuse_into(w, &mut out)?;
        Ok(out)
    }

    /// [`fuse`](Self::fuse) into an existing table with the same grids.
    pub fn fuse_into(&self, w: &WeightVector, out: &mut Lut<D>) -> Result<()> {
        if w.len() != self.count() {
            return Err(Error::DimensionMismatch {
                expected: self.count(),
                got: w.len(),
            });
        }
        if *out.grids() != self.grids {
            return Err(Error::ShapeMismatch("fusion target uses different grids"));
        }
        let dst = out.values_mut();
        dst.fill(0.0);
        for (values, &wt) in self.basis.iter().zip(w.as_slice()) {
            for (d, v) in dst.iter_mut().zip(values) {
                *d += wt * v;
            }
        }
        Ok(())
    }
}

/// Uniform-grid identity table of size `size`.
pub fn identity_ialut(size: usize) -> Result<Lut<4>> {
    Lut::identity(size)
}

/// Identity plus `count - 1` zero tables, with weights selecting the identity,
/// so the initial fused table is a no-op.
pub fn init_basis<const D: usize>(count: usize, size: usize) -> Result<(BasisLutSet<D>, WeightVector)> {
    if count == 0 {
        return Err(Error::InvalidConfig("basis count must be >= 1"));
    }
    let mut luts = Vec::with_capacity(count);
    luts.push(Lut::<D>::identity(size)?);
    for _ in 1..count {
        luts.push(Lut::<D>::zeros(size)?);
    }
    Ok((BasisLutSet::from_luts(luts)?, WeightVector::one_hot(count, 0)))
}
