use ialut::intensity::{write_intensity, MapFormat};
use ialut::pipeline::{bench_transform, denoise_hook, make_intensity, transform_video, IntensitySource};
use ialut::Error;
use ialut_core::metrics::{mabd, psnr};
use ialut_core::{IaLut4, IntensityMap, VideoTensor};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_video(rng: &mut ChaCha8Rng, frames: usize, h: usize, w: usize) -> VideoTensor {
    VideoTensor::new(frames, h, w, (0..frames * h * w * 3).map(|_| rng.random()).collect()).unwrap()
}

fn bits(v: &VideoTensor) -> Vec<u32> {
    v.data().iter().map(|x| x.to_bits()).collect()
}

#[test]
fn intensity_sources() {
    let white = VideoTensor::filled(2, 3, 3, [1.0; 3]);
    let half = make_intensity(&white, &IntensitySource::Constant(0.5)).unwrap();
    assert!(half.data().iter().all(|&e| e == 0.5));
    let m = make_intensity(&white, &IntensitySource::Luma).unwrap();
    assert!(m.data().iter().all(|&e| e.abs() < 1e-6));
    let red = VideoTensor::filled(1, 2, 2, [1.0, 0.0, 0.0]);
    let m = make_intensity(&red, &IntensitySource::Luma).unwrap();
    assert!(m.data().iter().all(|&e| (e - 0.701).abs() < 1e-6));

    let dir = tempfile::tempdir().unwrap();
    write_intensity(&IntensityMap::filled(2, 3, 4, 0.25), dir.path(), MapFormat::Raw).unwrap();
    let src = IntensitySource::File(dir.path().to_path_buf());
    assert!(matches!(make_intensity(&white, &src), Err(Error::Shape(_))));
    let fits = VideoTensor::filled(2, 3, 4, [0.2; 3]);
    assert!(make_intensity(&fits, &src).unwrap().data().iter().all(|&e| e == 0.25));

    assert_eq!("luma".parse::<IntensitySource>().unwrap(), IntensitySource::Luma);
    assert_eq!("constant:0.3".parse::<IntensitySource>().unwrap(), IntensitySource::Constant(0.3));
    assert!("constant:1.5".parse::<IntensitySource>().is_err());
    assert!("bright".parse::<IntensitySource>().is_err());
}

#[test]
fn identity_table_passes_frames_through() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = random_video(&mut rng, 3, 8, 8);
    let m = make_intensity(&v, &IntensitySource::Luma).unwrap();
    let out = transform_video(&IaLut4::identity(17).unwrap(), &v, &m, 2).unwrap();
    let worst = out.data().iter().zip(v.data()).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
    assert!(worst < 1e-6);
    assert_eq!(psnr(&out, &v).unwrap(), 99.0);
    assert!(mabd(&out, &v).unwrap() < 1e-6);
}

#[test]
fn worker_count_does_not_change_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let lut = IaLut4::random(9, &mut rng).unwrap();
    let v = random_video(&mut rng, 2, 13, 17);
    let m = make_intensity(&v, &IntensitySource::Luma).unwrap();
    let single = ialut_core::transform::transform_video(&lut, &v, &m).unwrap();
    for workers in [1, 2, 3, 8] {
        assert_eq!(bits(&transform_video(&lut, &v, &m, workers).unwrap()), bits(&single));
    }
}

#[test]
fn outputs_match_the_pointwise_lookup() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lut = IaLut4::random(5, &mut rng).unwrap();
    let v = random_video(&mut rng, 1, 4, 4);
    let m = make_intensity(&v, &IntensitySource::Luma).unwrap();
    let out = transform_video(&lut, &v, &m, 2).unwrap();
    for (p, (px, &e)) in v.data().chunks_exact(3).zip(m.data()).enumerate() {
        let want = lut.apply([px[0] as f64, px[1] as f64, px[2] as f64, e as f64]).unwrap();
        for c in 0..3 {
            assert_eq!(out.data()[p * 3 + c], want[c] as f32);
        }
    }
}

#[test]
fn identical_frames_transform_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lut = IaLut4::random(7, &mut rng).unwrap();
    let one = random_video(&mut rng, 1, 5, 6);
    let mut data = one.data().to_vec();
    data.extend_from_slice(one.data());
    let v = VideoTensor::new(2, 5, 6, data).unwrap();
    let m = make_intensity(&v, &IntensitySource::Luma).unwrap();
    let out = transform_video(&lut, &v, &m, 3).unwrap();
    assert_eq!(out.frame(0), out.frame(1));
}

#[test]
fn permuting_pixels_permutes_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let lut = IaLut4::random(5, &mut rng).unwrap();
    let v = random_video(&mut rng, 1, 6, 7);
    let m = make_intensity(&v, &IntensitySource::Constant(0.4)).unwrap();
    let mut perm: Vec<usize> = (0..42).collect();
    perm.shuffle(&mut rng);
    let shuffled: Vec<f32> = perm.iter().flat_map(|&p| v.data()[p * 3..p * 3 + 3].to_vec()).collect();
    let sv = VideoTensor::new(1, 6, 7, shuffled).unwrap();
    let a = transform_video(&lut, &v, &m, 2).unwrap();
    let b = transform_video(&lut, &sv, &m, 2).unwrap();
    for (i, &p) in perm.iter().enumerate() {
        assert_eq!(&b.data()[i * 3..i * 3 + 3], &a.data()[p * 3..p * 3 + 3]);
    }
}

#[test]
fn shape_mismatch_is_reported() {
    let v = VideoTensor::filled(2, 3, 3, [0.5; 3]);
    let m = IntensityMap::filled(2, 3, 4, 0.5);
    let err = transform_video(&IaLut4::identity(3).unwrap(), &v, &m, 1).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn denoiser_hook() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let v = random_video(&mut rng, 3, 4, 5);
    assert_eq!(denoise_hook(&v, None).unwrap(), v);
    assert_eq!(bits(&denoise_hook(&v, Some("cat")).unwrap()), bits(&v));

    let wrong = denoise_hook(&v, Some("cat >/dev/null; printf '5 4 2\\n'")).unwrap_err();
    assert!(wrong.to_string().contains("denoiser shape mismatch"));
    assert_eq!(wrong.exit_code(), 3);
    let short = denoise_hook(&v, Some("head -c 100")).unwrap_err();
    assert!(short.to_string().contains("denoiser shape mismatch"));

    let failed = denoise_hook(&v, Some("echo boom >&2; exit 7")).unwrap_err();
    assert!(matches!(failed, Error::Denoiser(_)));
    assert!(failed.to_string().contains("boom"));
    assert_ne!(failed.exit_code(), 0);
}

#[test]
fn bench_smoke() {
    let r = bench_transform(64, 64, 10, 2, 0).unwrap();
    assert!(r.fps > 0.0);
    assert_eq!((r.width, r.height, r.frames, r.workers), (64, 64, 10, 2));
    assert!((r.fps * r.secs_per_frame - 1.0).abs() < 1e-9);
    assert!(r.to_string().contains("fps="));
}
