//! `ialut` subcommands. [`run`] returns the process exit status: 0 on
//! success, 2 for input or format problems, 3 for shape mismatches and 4
//! for numerical failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ialut_core::metrics::{ab_var, mabd, md_ab, psnr, ssim};
use ialut_core::{fit, Clip, FitConfig, FitOutcome, Fitted, IntensityMode, LossWeights};

use crate::error::{Error, Result};
use crate::frames::{read_frames, write_frames, FrameFormat};
use crate::intensity::read_intensity;
use crate::lutfile::{detect_format, read_lut, write_basis, write_lut, AnyLut, LutFormat};
use crate::pipeline::{self, IntensitySource};

#[derive(Parser, Debug)]
#[command(name = "ialut", version, about = "Intensity-aware 4D lookup tables for video enhancement")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enhance a frame sequence with a table.
    Apply(ApplyArgs),
    /// Fit tables to paired low-light / reference sequences.
    Fit(FitArgs),
    /// Quality and brightness-consistency metrics of a prediction.
    Metrics(MetricsArgs),
    /// Render the RGB remainder of a 4D table at fixed intensity as an image.
    Slice(SliceArgs),
    /// Measure transform throughput on random data.
    Bench(BenchArgs),
    /// Convert a table between text and binary.
    Lutconv(LutconvArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Ppm,
    Raw,
}

impl From<OutFormat> for FrameFormat {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Ppm => FrameFormat::Ppm,
            OutFormat::Raw => FrameFormat::Raw,
        }
    }
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[arg(long)]
    lut: PathBuf,
    #[arg(long)]
    frames: PathBuf,
    /// constant:C, luma or file:DIR
    #[arg(long, default_value = "luma")]
    intensity: IntensitySource,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "ppm")]
    out_format: OutFormat,
    /// Shell command run as a post-processing denoiser.
    #[arg(long)]
    denoise: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    low: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    /// constant:C, luma, file:DIR or free
    #[arg(long, default_value = "luma")]
    intensity: String,
    #[arg(long, default_value_t = 33)]
    grid: usize,
    #[arg(long, default_value_t = 3)]
    basis: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 4e-4)]
    lr: f64,
    #[arg(long, default_value_t = 1e-7)]
    lr_min: f64,
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-4)]
    alpha_s: f64,
    #[arg(long, default_value_t = 10.0)]
    alpha_m: f64,
    #[arg(long, default_value_t = 8)]
    batch: usize,
    /// Trailing frames kept out of training for the final PSNR.
    #[arg(long, default_value_t = 0)]
    holdout: usize,
    /// Fused table; the basis and weights go to `<out>.basis`.
    #[arg(long)]
    out: PathBuf,
    /// Fit an RGB-only table.
    #[arg(long)]
    fit_3d: bool,
    /// Also write the per-epoch trace here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricFormat {
    Table,
    Kv,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: MetricFormat,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[arg(long)]
    lut: PathBuf,
    #[arg(long)]
    e: f64,
    /// PPM image, one L x L tile per blue level, red across and green down.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value = "1920x1080")]
    size: String,
    #[arg(long, default_value_t = 10)]
    frames: usize,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConvTarget {
    Text,
    Binary,
    Binary64,
}

#[derive(Args, Debug)]
struct LutconvArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to text for `.txt` outputs, otherwise binary, in double
    /// precision when the input is text or double-precision binary.
    #[arg(long, value_enum)]
    to: Option<ConvTarget>,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Errors go to stderr, results to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Cmd::Apply(a) => cmd_apply(a),
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::Metrics(a) => cmd_metrics(a),
        Cmd::Slice(a) => cmd_slice(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Lutconv(a) => cmd_lutconv(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ialut: {e}");
            e.exit_code()
        }
    }
}

fn cmd_apply(a: ApplyArgs) -> Result<()> {
    let lut = read_lut(&a.lut)?.into_ialut()?;
    let video = read_frames(&a.frames)?;
    let imap = pipeline::make_intensity(&video, &a.intensity)?;
    let workers = a.workers.unwrap_or_else(pipeline::default_workers);
    let out = pipeline::transform_video(&lut, &video, &imap, workers)?;
    let out = pipeline::denoise_hook(&out, a.denoise.as_deref())?;
    write_frames(&out, &a.out, a.out_format.into())
}

fn fit_intensity(spec: &str, low: &ialut_core::VideoTensor) -> Result<(IntensityMode, Option<ialut_core::IntensityMap>)> {
    if spec == "free" {
        return Ok((IntensityMode::Free, None));
    }
    match spec.parse::<IntensitySource>().map_err(Error::Format)? {
        IntensitySource::Constant(c) => Ok((IntensityMode::Constant(c), None)),
        IntensitySource::Luma => Ok((IntensityMode::Luma, None)),
        IntensitySource::File(dir) => {
            let map = read_intensity(&dir)?;
            if !map.matches(low) {
                return Err(Error::Shape("intensity map does not match the low-light clip".into()));
            }
            Ok((IntensityMode::Provided, Some(map)))
        }
    }
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    if a.grid < 2 {
        return Err(Error::Format("grid size must be ≥ 2".into()));
    }
    let low = read_frames(&a.low)?;
    let gt = read_frames(&a.gt)?;
    if !low.same_shape(&gt) {
        return Err(Error::Shape("low-light and reference clips differ in shape".into()));
    }
    let (intensity, map) = fit_intensity(&a.intensity, &low)?;
    let cfg = FitConfig {
        grid_size: a.grid,
        basis_count: a.basis,
        epochs: a.epochs,
        batch_size: a.batch,
        lr: a.lr,
        lr_min: a.lr_min,
        restarts: a.restarts,
        loss: LossWeights {
            alpha_s: a.alpha_s,
            alpha_m: a.alpha_m,
            ..LossWeights::default()
        },
        intensity,
        fit_3d: a.fit_3d,
        seed: a.seed,
        holdout_frames: a.holdout,
        ..FitConfig::default()
    };
    let clips = [Clip { low, gt, intensity: map }];
    let start = Instant::now();
    let fitted = match fit(&clips, &cfg) {
        Ok(f) => f,
        Err(abort) => {
            print!("{}", abort.report.to_text());
            return Err(abort.error.into());
        }
    };
    let secs = start.elapsed().as_secs_f64();
    let format = LutFormat::from_path(&a.out);
    let sidecar = sidecar_path(&a.out);
    let report = match fitted {
        Fitted::Ia(o) => save_fit(o, AnyLut::Ia, &a.out, &sidecar, format, secs)?,
        Fitted::Tri(o) => save_fit(o, AnyLut::Tri, &a.out, &sidecar, format, secs)?,
    };
    print!("{report}");
    if let Some(path) = &a.report {
        std::fs::write(path, &report).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".basis");
    PathBuf::from(s)
}

fn save_fit<const D: usize>(
    mut o: FitOutcome<D>,
    wrap: fn(ialut_core::Lut<D>) -> AnyLut,
    out: &Path,
    sidecar: &Path,
    format: LutFormat,
    secs: f64,
) -> Result<String> {
    write_lut(&wrap(o.export_lut(0)?), out, format)?;
    write_basis(&o.basis, &o.weights, sidecar)?;
    o.report.wall_clock_secs = Some(secs);
    let ch = o.report.final_channel_mse;
    Ok(format!(
        "{}# channel_mse={:.9e} {:.9e} {:.9e} wall_clock_secs={secs:.3}\n",
        o.report.to_text(),
        ch[0],
        ch[1],
        ch[2]
    ))
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let pred = read_frames(&a.pred)?;
    let gt = read_frames(&a.gt)?;
    if !pred.same_shape(&gt) {
        return Err(Error::Shape("prediction and reference differ in shape".into()));
    }
    let fmt_opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
    let md: Vec<String> = (0..pred.frames().saturating_sub(1))
        .map(|n| md_ab(std::slice::from_ref(&pred), n).map(|v| format!("{v:.6}")))
        .collect::<std::result::Result<_, _>>()?;
    let rows = [
        ("psnr", format!("{:.6}", psnr(&pred, &gt)?)),
        ("ssim", fmt_opt(ssim(&pred, &gt).ok())),
        ("ab_var", fmt_opt(ab_var(&pred, &gt).ok())),
        ("mabd", fmt_opt(mabd(&pred, &gt).ok())),
        ("md_ab", if md.is_empty() { "n/a".into() } else { md.join(",") }),
    ];
    for (k, v) in rows {
        match a.format {
            MetricFormat::Kv => println!("{k}={v}"),
            MetricFormat::Table => println!("{k:<8}{v}"),
        }
    }
    Ok(())
}

fn cmd_slice(a: SliceArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&a.e) {
        return Err(Error::Format(format!("intensity {} outside [0, 1]", a.e)));
    }
    let lut = match read_lut(&a.lut)? {
        AnyLut::Ia(l) => l.slice_at(a.e)?,
        AnyLut::Tri(l) => l,
    };
    let l = lut.size();
    let mut img = format!("P6\n{} {}\n255\n", l * l, l).into_bytes();
    for j in 0..l {
        for k in 0..l {
            for i in 0..l {
                let v = lut.node_value(lut.node_index([i, j, k]));
                img.extend(v.iter().map(|&c| crate::seqdir::quantize(c as f32)));
            }
        }
    }
    std::fs::write(&a.out, img).map_err(|e| Error::io(&a.out, e))
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let (w, h) = a
        .size
        .split_once('x')
        .and_then(|(w, h)| Some((w.parse().ok()?, h.parse().ok()?)))
        .ok_or_else(|| Error::Format(format!("bad size {:?}, expected WxH", a.size)))?;
    let workers = a.workers.unwrap_or_else(pipeline::default_workers);
    println!("{}", pipeline::bench_transform(w, h, a.frames, workers, a.seed)?);
    Ok(())
}

fn cmd_lutconv(a: LutconvArgs) -> Result<()> {
    let lut = read_lut(&a.input)?;
    let format = match a.to {
        Some(ConvTarget::Text) => LutFormat::Text,
        Some(ConvTarget::Binary) => LutFormat::Binary,
        Some(ConvTarget::Binary64) => LutFormat::Binary64,
        None => match (LutFormat::from_path(&a.out), detect_format(&a.input)?) {
            (LutFormat::Text, _) => LutFormat::Text,
            (_, LutFormat::Binary) => LutFormat::Binary,
            _ => LutFormat::Binary64,
        },
    };
    write_lut(&lut, &a.out, format)
}
