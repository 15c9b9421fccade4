//! Lookup tables over `[0, 1]^D` with multilinear interpolation.
//!
//! [`IaLut4`] is indexed by `(r, g, b, e)` where `e` is the per-pixel
//! enhancement intensity; [`Lut3`] is the plain RGB table. Both store an RGB
//! triple per grid node in a flat array laid out channel-fastest, then the
//! last axis, with the red axis slowest:
//!
//! ```text
//! values[((((i * L + j) * L + k) * L + m) * 3) + c]
//! ```

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Upper bound on the number of cell corners (`2^4`).
pub const MAX_CORNERS: usize = 16;

/// A multilinear RGB lookup table with `D` input axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Lut<const D: usize> {
    size: usize,
    grids: [Grid1D; D],
    values: Vec<f64>,
}

/// Intensity-aware table indexed by `(r, g, b, e)`.
pub type IaLut4 = Lut<4>;
/// Ordinary RGB table.
pub type Lut3 = Lut<3>;

/// Lower-corner grid indices of a unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellIndex<const D: usize>(pub [usize; D]);

pub type CellIndex4 = CellIndex<4>;

/// Interpolation coefficients for the corners of one cell.
///
/// Only the first `len` entries are meaningful (`2^D`). Corner `n` takes the
/// upper neighbour on axis `a` when bit `D - 1 - a` of `n` is set, so the
/// last axis toggles fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerWeights {
    pub weights: [f64; MAX_CORNERS],
    pub nodes: [usize; MAX_CORNERS],
    pub len: usize,
}

impl CornerWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes[..self.len]
            .iter()
            .copied()
            .zip(self.weights[..self.len].iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.weights[..self.len].iter().sum()
    }

    /// Coefficient attached to grid node `node`, or 0 if it is not a corner.
    pub fn weight_of(&self, node: usize) -> f64 {
        self.iter()
            .filter(|&(n, _)| n == node)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Output of [`Lut::apply_grad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplyGrad<const D: usize> {
    /// Interpolated output before clamping.
    pub output: [f64; 3],
    /// `d output_c / d values[node * 3 + c]`, identical for every channel.
    pub d_values: CornerWeights,
    /// `d_point[a][c] = d output_c / d point[a]`.
    pub d_point: [[f64; 3]; D],
}

impl ApplyGrad<4> {
    /// Derivative of the output with respect to the intensity coordinate.
    pub fn d_e(&self) -> [f64; 3] {
        self.d_point[3]
    }
}

struct AxisTerm {
    lo: usize,
    frac: f64,
    inv_width: f64,
}

impl<const D: usize> Lut<D> {
    pub fn new(grids: [Grid1D; D], values: Vec<f64>) -> Result<Self> {
        assert!(D >= 1 && D <= 4, "supported dimensions are 1..=4");
        let size = grids[0].len();
        if grids.iter().any(|g| g.len() != size) {
            return Err(Error::GridLengthMismatch);
        }
        let expected = 3 * size.pow(D as u32);
        if values.len() != expected {
            return Err(Error::ValueLength {
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self {
            size,
            grids,
            values,
        })
    }

    /// Builds a table on `grids` whose node values come from `f(node coordinates)`.
    pub fn from_fn(grids: [Grid1D; D], mut f: impl FnMut([f64; D]) -> [f64; 3]) -> Result<Self> {
        let size = grids[0].len();
        if grids.iter().any(|g| g.len() != size) {
            return Err(Error::GridLengthMismatch);
        }
        let nodes = size.pow(D as u32);
        let mut values = Vec::with_capacity(3 * nodes);
        for node in 0..nodes {
            let idx = unflatten::<D>(node, size);
            let coords = core::array::from_fn(|a| grids[a].point(idx[a]));
            values.extend_from_slice(&f(coords));
        }
        Self::new(grids, values)
    }

    pub fn uniform_grids(size: usize) -> Result<[Grid1D; D]> {
        let g = Grid1D::uniform(size)?;
        Ok(core::array::from_fn(|_| g.clone()))
    }

    /// Table whose output is the input colour, ignoring any axes past blue.
    pub fn identity(size: usize) -> Result<Self> {
        Self::from_fn(Self::uniform_grids(size)?, |p| {
            core::array::from_fn(|c| if c < D { p[c] } else { 0.0 })
        })
    }

    pub fn constant(size: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_fn(Self::uniform_grids(size)?, |_| rgb)
    }

    pub fn zeros(size: usize) -> Result<Self> {
        Self::constant(size, [0.0; 3])
    }

    /// Uniform-grid table with values drawn uniformly from `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Self> {
        Self::from_fn(Self::uniform_grids(size)?, |_| {
            [rng.random(), rng.random(), rng.random()]
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn grids(&self) -> &[Grid1D; D] {
        &self.grids
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access for optimisers. Callers must keep values finite.
    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.values.len() / 3
    }

    #[inline]
    pub fn node_index(&self, idx: [usize; D]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.size + i)
    }

    #[inline]
    pub fn node_value(&self, node: usize) -> [f64; 3] {
        let v = &self.values[node * 3..node * 3 + 3];
        [v[0], v[1], v[2]]
    }

    pub fn node_coords(&self, node: usize) -> [f64; D] {
        let idx = unflatten::<D>(node, self.size);
        core::array::from_fn(|a| self.grids[a].point(idx[a]))
    }

    pub fn clamp_values(&mut self) {
        for v in &mut self.values {
            *v = v.clamp(0.0, 1.0);
        }
    }

    /// Cell enclosing `point`; `point` must lie in `[0, 1]^D`.
    #[inline]
    pub fn locate(&self, point: &[f64; D]) -> CellIndex<D> {
        CellIndex(core::array::from_fn(|a| self.grids[a].locate_cell(point[a])))
    }

    #[inline]
    fn axis_terms(&self, cell: &CellIndex<D>, point: &[f64; D]) -> [AxisTerm; D] {
        core::array::from_fn(|a| {
            let g = &self.grids[a];
            let lo = cell.0[a];
            let (p0, p1) = (g.point(lo), g.point(lo + 1));
            let width = p1 - p0;
            AxisTerm {
                lo,
                frac: ((point[a] - p0) / width).clamp(0.0, 1.0),
                inv_width: 1.0 / width,
            }
        })
    }

    /// Tensor-product coefficients of `point` for the corners of `cell`.
    pub fn coefficients(&self, cell: &CellIndex<D>, point: &[f64; D]) -> CornerWeights {
        let terms = self.axis_terms(cell, point);
        self.corner_weights(&terms)
    }

    #[inline]
    fn corner_weights(&self, terms: &[AxisTerm; D]) -> CornerWeights {
        let mut out = CornerWeights {
            weights: [0.0; MAX_CORNERS],
            nodes: [0; MAX_CORNERS],
            len: 1 << D,
        };
        for n in 0..(1usize << D) {
            let mut w = 1.0;
            let mut node = 0;
            for (a, t) in terms.iter().enumerate() {
                let hi = (n >> (D - 1 - a)) & 1 == 1;
                w *= if hi { t.frac } else { 1.0 - t.frac };
                node = node * self.size + t.lo + hi as usize;
            }
            out.weights[n] = w;
            out.nodes[n] = node;
        }
        out
    }

    fn clamp_point(point: &[f64; D]) -> Result<[f64; D]> {
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(core::array::from_fn(|a| point[a].clamp(0.0, 1.0)))
    }

    #[inline]
    fn blend(&self, cw: &CornerWeights) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (node, w) in cw.iter() {
            let v = &self.values[node * 3..node * 3 + 3];
            out[0] += w * v[0];
            out[1] += w * v[1];
            out[2] += w * v[2];
        }
        out
    }

    /// Interpolated output before the final clamp. Inputs are clamped into the
    /// unit hypercube.
    pub fn apply_unclamped(&self, point: [f64; D]) -> Result<[f64; 3]> {
        let p = Self::clamp_point(&point)?;
        Ok(self.interpolate(&p))
    }

    /// Same arithmetic as `blend(coefficients(..))`, without materialising
    /// the corner list.
    #[inline]
    fn interpolate(&self, p: &[f64; D]) -> [f64; 3] {
        let mut frac = [0.0; D];
        let mut stride = [0usize; D];
        let mut base = 0;
        let mut s = 1;
        for a in (0..D).rev() {
            stride[a] = s;
            s *= self.size;
        }
        for a in 0..D {
            let pts = self.grids[a].points();
            let lo = self.grids[a].locate_cell(p[a]);
            let (p0, p1) = (pts[lo], pts[lo + 1]);
            frac[a] = ((p[a] - p0) / (p1 - p0)).clamp(0.0, 1.0);
            base += lo * stride[a];
        }
        // Corner products built one axis at a time; entry `n` ends up equal
        // to the product in `corner_weights`, multiplied in the same order.
        let mut w = [0.0; MAX_CORNERS];
        let mut node = [0usize; MAX_CORNERS];
        w[0] = 1.0;
        node[0] = base;
        for a in 0..D {
            let count = 1usize << a;
            for k in (0..count).rev() {
                let (wk, nk) = (w[k], node[k]);
                w[2 * k] = wk * (1.0 - frac[a]);
                w[2 * k + 1] = wk * frac[a];
                node[2 * k] = nk;
                node[2 * k + 1] = nk + stride[a];
            }
        }
        let mut out = [0.0; 3];
        for n in 0..(1usize << D) {
            let v = &self.values[node[n] * 3..node[n] * 3 + 3];
            out[0] += w[n] * v[0];
            out[1] += w[n] * v[1];
            out[2] += w[n] * v[2];
        }
        out
    }

    /// Maps `point` through the table; the result lies in `[0, 1]^3`.
    pub fn apply(&self, point: [f64; D]) -> Result<[f64; 3]> {
        self.apply_unclamped(point).map(clamp3)
    }

    /// Output (pre-clamp) together with its derivatives with respect to the
    /// corner values and the input coordinates.
    ///
    /// Coordinate derivatives are taken inside the located cell, so on a
    /// grid point they are one-sided.
    pub fn apply_grad(&self, point: [f64; D]) -> Result<ApplyGrad<D>> {
        let p = Self::clamp_point(&point)?;
        let cell = self.locate(&p);
        let terms = self.axis_terms(&cell, &p);
        let cw = self.corner_weights(&terms);
        let output = self.blend(&cw);

        let mut d_point = [[0.0; 3]; D];
        for n in 0..(1usize << D) {
            let v = self.node_value(cw.nodes[n]);
            for (a, d) in d_point.iter_mut().enumerate() {
                let mut w = 1.0;
                for (b, t) in terms.iter().enumerate() {
                    let hi = (n >> (D - 1 - b)) & 1 == 1;
                    w *= match (a == b, hi) {
                        (true, true) => t.inv_width,
                        (true, false) => -t.inv_width,
                        (false, true) => t.frac,
                        (false, false) => 1.0 - t.frac,
                    };
                }
                for c in 0..3 {
                    d[c] += w * v[c];
                }
            }
        }
        Ok(ApplyGrad {
            output,
            d_values: cw,
            d_point,
        })
    }
}

impl Lut<4> {
    /// Quadrilinear coefficients of `point` inside `cell`.
    pub fn quad_coefficients(&self, cell: &CellIndex4, point: &[f64; 4]) -> CornerWeights {
        self.coefficients(cell, point)
    }

    /// Node values of the 3D slice at intensity `e`, interpolated along `e`.
    pub fn slice_at(&self, e: f64) -> Result<Lut3> {
        let grids = [
            self.grids[0].clone(),
            self.grids[1].clone(),
            self.grids[2].clone(),
        ];
        let mut err = None;
        let out = Lut3::from_fn(grids, |p| match self.apply([p[0], p[1], p[2], e]) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                [0.0; 3]
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

#[inline]
pub(crate) fn clamp3(v: [f64; 3]) -> [f64; 3] {
    [v[0].clamp(0.0, 1.0), v[1].clamp(0.0, 1.0), v[2].clamp(0.0, 1.0)]
}

/// Splits a flat node index into per-axis indices, red axis first.
pub fn unflatten<const D: usize>(mut node: usize, size: usize) -> [usize; D] {
    let mut idx = [0; D];
    for a in (0..D).rev() {
        idx[a] = node % size;
        node /= size;
    }
    idx
}

/// Flattened value array of `count` LUTs sharing one size; used by fusion.
pub(crate) fn zero_values(size: usize, dims: usize) -> Vec<f64> {
    vec![0.0; 3 * size.pow(dims as u32)]
}
