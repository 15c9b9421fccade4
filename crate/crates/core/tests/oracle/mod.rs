//! Independent reference computations used by the test suites.
//!
//! Nothing here calls into the code under test beyond reading raw table
//! data, so a bug in the library cannot hide behind a matching oracle.

#![allow(dead_code)]

/// Cell by linear scan: last `c` with `points[c] <= v`, capped at `len - 2`.
pub fn scan_cell(points: &[f64], v: f64) -> usize {
    let mut c = 0;
    for i in 0..points.len() - 1 {
        if points[i] <= v {
            c = i;
        }
    }
    c
}

/// Multilinear interpolation by successive per-axis lerps (red axis first).
///
/// `grids[a]` are the axis coordinates, `values` the flattened table in
/// channel-fastest layout with axis 0 slowest.
pub fn nested_lerp(grids: &[Vec<f64>], values: &[f64], point: &[f64]) -> [f64; 3] {
    let d = grids.len();
    let l = grids[0].len();
    let cells: Vec<usize> = (0..d).map(|a| scan_cell(&grids[a], point[a])).collect();
    let ts: Vec<f64> = (0..d)
        .map(|a| {
            let (p0, p1) = (grids[a][cells[a]], grids[a][cells[a] + 1]);
            (point[a] - p0) / (p1 - p0)
        })
        .collect();
    // Gather the 2^d corners, axis 0 as the most significant bit.
    let mut corners: Vec<[f64; 3]> = Vec::with_capacity(1 << d);
    for n in 0..(1usize << d) {
        let mut node = 0;
        for a in 0..d {
            let bit = (n >> (d - 1 - a)) & 1;
            node = node * l + cells[a] + bit;
        }
        corners.push([values[node * 3], values[node * 3 + 1], values[node * 3 + 2]]);
    }
    // Collapse axis 0 first: pairs differ in the most significant bit.
    for a in 0..d {
        let half = corners.len() / 2;
        let t = ts[a];
        let next: Vec<[f64; 3]> = (0..half)
            .map(|i| {
                let lo = corners[i];
                let hi = corners[i + half];
                [
                    lo[0] + t * (hi[0] - lo[0]),
                    lo[1] + t * (hi[1] - lo[1]),
                    lo[2] + t * (hi[2] - lo[2]),
                ]
            })
            .collect();
        corners = next;
    }
    corners[0]
}

/// Central difference of a scalar function along one coordinate.
pub fn central_diff(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `|a - b| / max(|a|, |b|, floor)`; the floor keeps near-zero components
/// from turning rounding noise into a large ratio.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

fn forward_pairs(l: usize, d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let nodes = l.pow(d as u32);
    for node in 0..nodes {
        let mut rest = node;
        let mut idx = vec![0; d];
        for a in (0..d).rev() {
            idx[a] = rest % l;
            rest /= l;
        }
        for a in 0..d {
            if idx[a] + 1 < l {
                let stride = l.pow((d - 1 - a) as u32);
                out.push((node, node + stride));
            }
        }
    }
    out
}

/// Direct summation of squared forward differences.
pub fn smooth_sum(values: &[f64], l: usize, d: usize) -> f64 {
    forward_pairs(l, d)
        .into_iter()
        .map(|(x, n)| (0..3).map(|c| (values[n * 3 + c] - values[x * 3 + c]).powi(2)).sum::<f64>())
        .sum()
}

/// Direct summation of decreases along forward steps.
pub fn mono_sum(values: &[f64], l: usize, d: usize) -> f64 {
    forward_pairs(l, d)
        .into_iter()
        .map(|(x, n)| (0..3).map(|c| (values[x * 3 + c] - values[n * 3 + c]).max(0.0)).sum::<f64>())
        .sum()
}

/// Textbook Adam on a scalar, written without reference to the library.
pub fn adam_reference(mut x: f64, grad: impl Fn(f64) -> f64, lr: f64, steps: usize) -> Vec<f64> {
    let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8);
    let (mut m, mut v) = (0.0, 0.0);
    let mut traj = Vec::with_capacity(steps);
    for t in 1..=steps {
        let g = grad(x);
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        let mh = m / (1.0 - b1.powi(t as i32));
        let vh = v / (1.0 - b2.powi(t as i32));
        x -= lr * mh / (vh.sqrt() + eps);
        traj.push(x);
    }
    traj
}

/// Brute-force SSIM: explicit 2D Gaussian window at every valid position.
pub fn ssim_direct(a: &[f64], b: &[f64], h: usize, w: usize) -> f64 {
    let win = 11usize;
    let sigma = 1.5f64;
    let mut k = vec![0.0; win * win];
    let mut ks = 0.0;
    for y in 0..win {
        for x in 0..win {
            let dy = y as f64 - 5.0;
            let dx = x as f64 - 5.0;
            let v = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            k[y * win + x] = v;
            ks += v;
        }
    }
    k.iter_mut().for_each(|v| *v /= ks);
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut total = 0.0;
    let mut count = 0;
    for y0 in 0..=h - win {
        for x0 in 0..=w - win {
            let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for y in 0..win {
                for x in 0..win {
                    let kv = k[y * win + x];
                    let pa = a[(y0 + y) * w + x0 + x];
                    let pb = b[(y0 + y) * w + x0 + x];
                    ma += kv * pa;
                    mb += kv * pb;
                    saa += kv * pa * pa;
                    sbb += kv * pb * pb;
                    sab += kv * pa * pb;
                }
            }
            let va = saa - ma * ma;
            let vb = sbb - mb * mb;
            let cov = sab - ma * mb;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// Rec.601 luma of an interleaved RGB buffer.
pub fn luma_plane(rgb: &[f32]) -> Vec<f64> {
    rgb.chunks_exact(3)
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

/// Richardson-extrapolated central difference, `(4 D(h/2) - D(h)) / 3`,
/// accurate to O(h^4) for functions with sharp curvature.
pub fn richardson_diff(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h;
    (4.0 * d2 - d1) / 3.0
}
