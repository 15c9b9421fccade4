mod oracle;

use ialut_core::metrics::{ab_series, ab_var, mabd, md_ab, psnr, ssim};
use ialut_core::VideoTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_video(rng: &mut ChaCha8Rng, frames: usize, h: usize, w: usize) -> VideoTensor {
    let data = (0..frames * h * w * 3).map(|_| rng.random::<f32>()).collect();
    VideoTensor::new(frames, h, w, data).unwrap()
}

/// Video whose every pixel is grey level `levels[n]` in frame `n`.
fn grey_video(levels: &[f32], h: usize, w: usize) -> VideoTensor {
    let mut data = Vec::new();
    for &l in levels {
        data.extend(std::iter::repeat_n(l, h * w * 3));
    }
    VideoTensor::new(levels.len(), h, w, data).unwrap()
}

#[test]
fn psnr_against_two_pass_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let a = random_video(&mut rng, 3, 16, 20);
    let b = random_video(&mut rng, 3, 16, 20);
    let mut sq = 0.0;
    for (x, y) in a.data().iter().zip(b.data()) {
        sq += (*x as f64 - *y as f64).powi(2);
    }
    let mse = sq / a.data().len() as f64;
    let want = 10.0 * (1.0 / mse).log10();
    assert!((psnr(&a, &b).unwrap() - want).abs() < 1e-9);
}

#[test]
fn psnr_uniform_difference_is_20db() {
    let a = grey_video(&[0.5, 0.5], 4, 4);
    let b = grey_video(&[0.6, 0.6], 4, 4);
    assert!((psnr(&a, &b).unwrap() - 20.0).abs() < 1e-5);
    assert_eq!(psnr(&a, &a).unwrap(), 99.0);
}

#[test]
fn ssim_against_direct_window_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let a = random_video(&mut rng, 2, 20, 24);
    let inv: Vec<f32> = a.data().iter().map(|v| 1.0 - v).collect();
    let b = VideoTensor::new(2, 20, 24, inv).unwrap();
    let got = ssim(&a, &b).unwrap();
    let want = (0..2)
        .map(|n| oracle::ssim_direct(&oracle::luma_plane(a.frame(n)), &oracle::luma_plane(b.frame(n)), 20, 24))
        .sum::<f64>()
        / 2.0;
    assert!(got < 1.0);
    assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    let k = grey_video(&[0.5], 12, 12);
    assert_eq!(ssim(&k, &k).unwrap(), 1.0);
}

#[test]
fn consistency_metrics_closed_forms() {
    let gt = grey_video(&[0.2, 0.4, 0.3, 0.5], 3, 3);
    assert_eq!(ab_var(&gt, &gt).unwrap(), 0.0);
    assert_eq!(mabd(&gt, &gt).unwrap(), 0.0);

    let brighter = grey_video(&[0.3, 0.5, 0.4, 0.6], 3, 3);
    assert!(ab_var(&brighter, &gt).unwrap() < 1e-9);
    assert!(mabd(&brighter, &gt).unwrap() < 1e-4);

    let base = grey_video(&[0.5; 4], 3, 3);
    let alt = grey_video(&[0.51, 0.49, 0.51, 0.49], 3, 3);
    assert!((ab_var(&alt, &base).unwrap() - 0.1).abs() < 1e-5);

    let flick = grey_video(&[0.0, 0.02, 0.0], 2, 2);
    let dark = grey_video(&[0.0; 3], 2, 2);
    assert!((mabd(&flick, &dark).unwrap() - 20.0).abs() < 1e-4);

    let s1 = grey_video(&[0.3; 3], 2, 2);
    let s2 = grey_video(&[0.7; 3], 2, 2);
    assert_eq!(mabd(&s1, &s2).unwrap(), 0.0);
}

#[test]
fn md_ab_against_direct_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let videos: Vec<VideoTensor> = (0..5).map(|_| random_video(&mut rng, 4, 6, 5)).collect();
    for pair in 0..3 {
        let mut want = 0.0;
        for v in &videos {
            let ab: Vec<f64> = (0..4)
                .map(|n| {
                    let l = oracle::luma_plane(v.frame(n));
                    l.iter().sum::<f64>() / l.len() as f64
                })
                .collect();
            want += (ab[pair + 1] - ab[pair]).abs();
        }
        want /= videos.len() as f64;
        assert!((md_ab(&videos, pair).unwrap() - want).abs() < 1e-12);
    }
    assert!(md_ab(&videos, 3).is_err());

    let jump = grey_video(&[0.4, 0.4, 0.45, 0.45], 2, 2);
    assert!((md_ab(std::slice::from_ref(&jump), 1).unwrap() - 0.05).abs() < 1e-7);
    assert!(md_ab(&[jump], 0).unwrap() < 1e-12);
}

#[test]
fn consistency_metrics_ignore_constant_offsets() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let pred = random_video(&mut rng, 5, 4, 4);
    let gt = random_video(&mut rng, 5, 4, 4);
    let shifted = VideoTensor::new(5, 4, 4, pred.data().iter().map(|v| v + 0.25).collect()).unwrap();
    assert!((ab_var(&pred, &gt).unwrap() - ab_var(&shifted, &gt).unwrap()).abs() < 1e-6);
    assert!((mabd(&pred, &gt).unwrap() - mabd(&shifted, &gt).unwrap()).abs() < 1e-4);
    assert_eq!(ab_series(&pred).len(), 5);
}
