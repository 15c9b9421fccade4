mod oracle;

use ialut_core::{CellIndex, Grid1D, IaLut4, Lut, Lut3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grids_of<const D: usize>(lut: &Lut<D>) -> Vec<Vec<f64>> {
    lut.grids().iter().map(|g| g.points().to_vec()).collect()
}

fn uneven_lut(rng: &mut ChaCha8Rng) -> IaLut4 {
    let mut pts = vec![0.0, 1.0];
    while pts.len() < 7 {
        pts.push(rng.random_range(0.01..0.99));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let g = Grid1D::new(pts).unwrap();
    IaLut4::from_fn([g.clone(), g.clone(), g.clone(), g], |_| {
        [rng.random(), rng.random(), rng.random()]
    })
    .unwrap()
}

#[test]
fn apply_matches_nested_lerp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for lut in [IaLut4::random(9, &mut rng).unwrap(), uneven_lut(&mut rng)] {
        let grids = grids_of(&lut);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let p: [f64; 4] = std::array::from_fn(|_| rng.random());
            let got = lut.apply(p).unwrap();
            let want = oracle::nested_lerp(&grids, lut.values(), &p);
            for c in 0..3 {
                worst = worst.max((got[c] - want[c]).abs());
            }
        }
        assert!(worst < 1e-12, "max abs error {worst}");
    }
}

#[test]
fn tri_apply_matches_nested_lerp() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let lut = Lut3::random(17, &mut rng).unwrap();
    let grids = grids_of(&lut);
    for _ in 0..10_000 {
        let p: [f64; 3] = std::array::from_fn(|_| rng.random());
        let got = lut.apply(p).unwrap();
        let want = oracle::nested_lerp(&grids, lut.values(), &p);
        for c in 0..3 {
            assert!((got[c] - want[c]).abs() < 1e-12);
        }
    }
}

#[test]
fn random_interior_coefficients_match_sequential_lerp() {
    // Interpolating a table whose only non-zero value is a single corner
    // isolates that corner's coefficient.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let base = IaLut4::zeros(5).unwrap();
    let grids = grids_of(&base);
    for _ in 0..200 {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random());
        let cell = base.locate(&p);
        let cw = base.quad_coefficients(&cell, &p);
        for (node, w) in cw.iter() {
            let mut values = base.values().to_vec();
            values[node * 3] = 1.0;
            let want = oracle::nested_lerp(&grids, &values, &p)[0];
            assert!((w - want).abs() < 1e-12);
        }
    }
}

#[test]
fn partition_of_unity_and_non_negativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let lut = uneven_lut(&mut rng);
    for _ in 0..20_000 {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random());
        let cw = lut.coefficients(&lut.locate(&p), &p);
        assert!((cw.sum() - 1.0).abs() < 1e-12);
        assert!(cw.weights.iter().all(|&w| (0.0..=1.0).contains(&w)));
    }
}

#[test]
fn grid_points_return_stored_values_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for lut in [IaLut4::random(6, &mut rng).unwrap(), uneven_lut(&mut rng)] {
        for node in 0..lut.node_count() {
            let p = lut.node_coords(node);
            assert_eq!(lut.apply(p).unwrap(), lut.node_value(node));
        }
    }
}

#[test]
fn locate_cell_examples() {
    let g = Grid1D::uniform(33).unwrap();
    for (v, c) in [(0.0, 0), (1.0, 31), (0.5, 16)] {
        assert_eq!(g.locate_cell(v), c);
        assert_eq!(oracle::scan_cell(g.points(), v), c);
    }
}

#[test]
fn value_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let lut = IaLut4::random(5, &mut rng).unwrap();
    for _ in 0..200 {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random());
        let g = lut.apply_grad(p).unwrap();
        let (node, w) = g.d_values.iter().nth(rng.random_range(0..16)).unwrap();
        let c = rng.random_range(0..3);
        let fd = oracle::central_diff(
            |x| {
                let mut l = lut.clone();
                l.values_mut()[node * 3 + c] = x;
                l.apply_unclamped(p).unwrap()[c]
            },
            lut.values()[node * 3 + c],
            1e-6,
        );
        assert!(oracle::rel_err(w, fd, 1e-8) < 1e-5, "w {w} fd {fd}");
    }
}

#[test]
fn intensity_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let lut = IaLut4::random(9, &mut rng).unwrap();
    let h = 1e-6;
    let mut probes = 0;
    while probes < 1000 {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random());
        // Stay clear of cell boundaries in e so the difference stencil sees
        // one linear piece.
        let cell = lut.locate(&p).0[3];
        let g = &lut.grids()[3];
        if p[3] - g.point(cell) < 2.0 * h || g.point(cell + 1) - p[3] < 2.0 * h {
            continue;
        }
        let de = lut.apply_grad(p).unwrap().d_e();
        for c in 0..3 {
            let fd = oracle::central_diff(
                |e| lut.apply_unclamped([p[0], p[1], p[2], e]).unwrap()[c],
                p[3],
                h,
            );
            assert!(oracle::rel_err(de[c], fd, 1e-6) < 1e-5, "de {} fd {fd}", de[c]);
        }
        probes += 1;
    }
}

#[test]
fn rgb_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let lut = IaLut4::random(5, &mut rng).unwrap();
    for _ in 0..300 {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.01..0.99));
        let g = lut.apply_grad(p).unwrap();
        for a in 0..3 {
            let cell = lut.locate(&p).0[a];
            let grid = &lut.grids()[a];
            if p[a] - grid.point(cell) < 1e-5 || grid.point(cell + 1) - p[a] < 1e-5 {
                continue;
            }
            for c in 0..3 {
                let fd = oracle::central_diff(
                    |x| {
                        let mut q = p;
                        q[a] = x;
                        lut.apply_unclamped(q).unwrap()[c]
                    },
                    p[a],
                    1e-6,
                );
                assert!(oracle::rel_err(g.d_point[a][c], fd, 1e-6) < 1e-5);
            }
        }
    }
}

#[test]
fn lower_corner_of_explicit_cell() {
    let lut = IaLut4::identity(3).unwrap();
    let cw = lut.quad_coefficients(&CellIndex([1, 1, 1, 1]), &[0.5, 0.5, 0.5, 0.5]);
    assert_eq!(cw.weights[0], 1.0);
    assert_eq!(cw.nodes[0], lut.node_index([1, 1, 1, 1]));
}

proptest! {
    #[test]
    fn interpolation_is_linear_in_values(
        seed in any::<u64>(),
        s in -3.0f64..3.0,
        t in -3.0f64..3.0,
        p in prop::array::uniform4(0.0f64..=1.0),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = IaLut4::random(4, &mut rng).unwrap();
        let b = IaLut4::random(4, &mut rng).unwrap();
        let mixed: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| s * x + t * y).collect();
        let m = IaLut4::new(a.grids().clone(), mixed).unwrap();
        let (oa, ob, om) = (
            a.apply_unclamped(p).unwrap(),
            b.apply_unclamped(p).unwrap(),
            m.apply_unclamped(p).unwrap(),
        );
        for c in 0..3 {
            prop_assert!((om[c] - (s * oa[c] + t * ob[c])).abs() < 1e-12);
        }
    }

    #[test]
    fn locate_matches_scan(v in 0.0f64..=1.0, len in 2usize..40) {
        let g = Grid1D::uniform(len).unwrap();
        prop_assert_eq!(g.locate_cell(v), oracle::scan_cell(g.points(), v));
    }
}
