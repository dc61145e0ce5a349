//! Subcommand implementations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quatpaint_core::depth::heuristic_depth;
use quatpaint_core::imaging::io::{read_mask, read_rgb, write_gray, write_mask, write_png};
use quatpaint_core::imaging::{apply_mask, metrics::delta_scores};
use quatpaint_core::synthetic::{layered_scene, low_rank_quaternion};
use quatpaint_core::{
    decode_quaternion, encode_quaternion, gen_mask, run_dlrqmc, run_lrqmc, seeded_rng, MaskMatrix, PipelineOptions,
    RgbImage, ScorePair,
};

use crate::args::{
    BenchmarkArgs, DepthProxyArgs, InpaintArgs, MaskArgs, MetricsArgs, ProxyKind, ShowConfigArgs, SynthArgs,
    SynthKind,
};
use crate::benchmark::{describe_provider, discover_images, run_benchmark, summarize, write_csv, SummaryFile};
use crate::config::{Mode, RunConfig};
use crate::report::{DepthSummary, Deltas, InpaintReport, MaskSummary, ScoreBlock, Scores};

fn output_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = config.output_dir.clone().context("an output directory is required (--out-dir)")?;
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn first_input(explicit: Option<&PathBuf>, config: &RunConfig) -> Result<PathBuf> {
    match explicit.or(config.inputs.first()) {
        Some(p) => Ok(p.clone()),
        None => bail!("no input image given"),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_mask(args: &MaskArgs) -> Result<()> {
    let config = args.common.resolve()?;
    config.validate()?;
    let dir = output_dir(&config)?;
    let image = read_rgb(&args.input)?;
    let (rows, cols) = image.shape();
    let mask = gen_mask(&mut seeded_rng(config.solver.seed), rows, cols, config.missing_fraction)?;
    write_png(dir.join("masked.png"), &apply_mask(&image, &mask)?)?;
    write_mask(dir.join("mask.png"), &mask)?;
    println!("missing pixels: {} of {}", mask.missing_count(), rows * cols);
    Ok(())
}

fn load_mask(path: Option<&PathBuf>, image: &RgbImage, config: &RunConfig) -> Result<(MaskMatrix, String)> {
    let (rows, cols) = image.shape();
    match path {
        Some(p) => {
            let mask = read_mask(p)?;
            if mask.shape() != (rows, cols) {
                bail!(
                    "mask {} is {}x{} but the image is {rows}x{cols}",
                    p.display(),
                    mask.rows(),
                    mask.cols()
                );
            }
            Ok((mask, p.display().to_string()))
        }
        None => Ok((
            gen_mask(&mut seeded_rng(config.solver.seed), rows, cols, config.missing_fraction)?,
            "generated".into(),
        )),
    }
}

pub fn cmd_inpaint(args: &InpaintArgs) -> Result<()> {
    let mut config = args.common.resolve()?;
    args.depth.apply(&mut config);
    if let Some(m) = args.mode {
        config.mode = m;
    }
    config.validate()?;
    let input = first_input(args.input.as_ref(), &config)?;
    let dir = output_dir(&config)?;

    let image = read_rgb(&input)?;
    let (mask, mask_source) = load_mask(args.mask.as_ref(), &image, &config)?;
    let observed = apply_mask(&image, &mask)?;
    let y = encode_quaternion(&observed);
    let truth = args.truth.as_ref().map(read_rgb).transpose()?;
    if let Some(t) = &truth {
        t.check_same_shape(&image).context("ground truth and input differ in size")?;
    }
    if mask_source == "generated" {
        write_mask(dir.join("mask.png"), &mask)?;
    }
    if args.intermediates {
        write_png(dir.join("masked.png"), &observed)?;
    }

    let score = |img: &RgbImage| -> Result<Option<ScorePair>> {
        truth.as_ref().map(|t| ScorePair::compute(t, img)).transpose().map_err(Into::into)
    };

    let (restored, report) = match config.mode {
        Mode::Lrqmc => {
            let (x, trace) = run_lrqmc(&y, &mask, &config.solver)?;
            let restored = decode_quaternion(&x);
            let scores = score(&restored)?.map(|s| ScoreBlock { lrqmc: Some(s.into()), ..Default::default() });
            (restored, base_report(&config, &input, &mask, mask_source, trace, scores))
        }
        Mode::Dlrqmc => {
            let spec = config.depth.provider(None)?;
            let options = PipelineOptions {
                target_polarity: config.depth.target_polarity,
                real_part: config.real_part,
                reuse_seed: config.reuse_seed,
            };
            let r = run_dlrqmc(&y, &mask, &config.solver, &spec, &options)?;
            if args.intermediates {
                write_png(dir.join("x0.png"), &r.x0_image)?;
                write_gray(dir.join("depth.png"), r.depth.rows(), r.depth.cols(), r.depth.values())?;
            }
            let scores = match (score(&r.x0_image)?, score(&r.final_image)?) {
                (Some(a), Some(b)) => {
                    let (dp, ds) = delta_scores(a, b);
                    Some(ScoreBlock {
                        lrqmc: Some(a.into()),
                        dlrqmc: Some(b.into()),
                        delta: Some(Deltas { delta_psnr: dp, delta_ssim: ds }),
                    })
                }
                _ => None,
            };
            let (t1, t2) = r.traces;
            let mut report = base_report(&config, &input, &mask, mask_source, t1, scores);
            report.second_pass = Some(t2);
            report.depth = Some(DepthSummary {
                provider: describe_provider(&config),
                proxy: spec.is_proxy(),
                native_polarity: spec.polarity.as_str().into(),
                injected_polarity: r.depth.polarity().as_str().into(),
                time_s: r.depth_time_s,
            });
            (r.final_image, report)
        }
    };
    write_png(dir.join("restored.png"), &restored)?;
    write_json(&dir.join("report.json"), &report)?;
    println!("wrote {}", dir.join("restored.png").display());
    if let Some(ScoreBlock { lrqmc, dlrqmc, delta }) = &report.scores {
        let fmt = |s: &Scores| format!("PSNR {} dB, SSIM {:.4}", crate::report::format_score(s.psnr), s.ssim);
        if let Some(s) = lrqmc {
            println!("lrqmc:  {}", fmt(s));
        }
        if let Some(s) = dlrqmc {
            println!("dlrqmc: {}", fmt(s));
        }
        if let Some(d) = delta {
            println!("delta:  PSNR {:+.4} dB, SSIM {:+.4}", d.delta_psnr, d.delta_ssim);
        }
    }
    Ok(())
}

fn base_report(
    config: &RunConfig,
    input: &Path,
    mask: &MaskMatrix,
    mask_source: String,
    first_pass: quatpaint_core::SolverTrace,
    scores: Option<ScoreBlock>,
) -> InpaintReport {
    InpaintReport {
        mode: config.mode.as_str().into(),
        input: input.display().to_string(),
        solver: config.solver,
        real_part: config.real_part,
        reuse_seed: config.reuse_seed,
        mask: MaskSummary {
            rows: mask.rows(),
            cols: mask.cols(),
            missing: mask.missing_count(),
            source: mask_source,
        },
        depth: None,
        first_pass,
        second_pass: None,
        scores,
        ssim_convention: InpaintReport::ssim_convention(),
    }
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let mut config = args.common.resolve()?;
    args.depth.apply(&mut config);
    if let Some(j) = args.jobs {
        config.jobs = Some(j);
    }
    if let Some(dir) = &args.images {
        config.inputs = vec![dir.clone()];
    }
    config.validate()?;
    let images_dir = first_input(None, &config)?;
    let dir = output_dir(&config)?;
    let images = discover_images(&images_dir)?;

    let records = run_benchmark(&images, &config)?;
    write_csv(&dir.join("results.csv"), &records)?;
    let summary = summarize(&records);
    write_json(&dir.join("summary.json"), &SummaryFile::new(&summary, &config))?;

    println!("images: {}, failed records: {}", summary.images, summary.failed_records);
    for (name, arm) in [("white", &summary.white), ("black", &summary.black), ("best-of-two", &summary.best_of_two)] {
        println!(
            "{name:>11}: delta PSNR > 0 on {}, delta SSIM > 0 on {}",
            arm.delta_psnr_positive, arm.delta_ssim_positive
        );
    }
    Ok(())
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<()> {
    let reference = read_rgb(&args.reference)?;
    let test = read_rgb(&args.test)?;
    let s = ScorePair::compute(&reference, &test)?;
    #[derive(serde::Serialize)]
    struct Out {
        #[serde(flatten)]
        scores: Scores,
        ssim_convention: &'static str,
    }
    let out = Out {
        scores: s.into(),
        ssim_convention: InpaintReport::ssim_convention(),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

pub fn cmd_depth_proxy(args: &DepthProxyArgs) -> Result<()> {
    let image = read_rgb(&args.input)?;
    let (rows, cols) = image.shape();
    let values = match args.kind {
        ProxyKind::Luminance => image.luminance(),
        ProxyKind::Zero => vec![0.0; rows * cols],
        ProxyKind::Heuristic => heuristic_depth(&image).values().to_vec(),
    };
    write_gray(&args.output, rows, cols, &values)?;
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    match &args.what {
        SynthKind::Scenes {
            count,
            rows,
            cols,
            layers,
            seed,
            out_dir,
        } => {
            let images = out_dir.join("images");
            let depths = out_dir.join("depth");
            for d in [&images, &depths] {
                std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
            }
            let mut rng = seeded_rng(*seed);
            for k in 0..*count {
                let s = layered_scene(&mut rng, *rows, *cols, *layers);
                let name = format!("scene_{k:03}.png");
                write_png(images.join(&name), &s.image)?;
                write_gray(depths.join(&name), *rows, *cols, s.depth.values())?;
            }
            println!("wrote {count} scenes to {}", out_dir.display());
        }
        SynthKind::LowRank {
            rows,
            cols,
            rank,
            seed,
            output,
        } => {
            let q = low_rank_quaternion(&mut seeded_rng(*seed), *rows, *cols, *rank, true);
            write_png(output, &decode_quaternion(&q))?;
            println!("wrote {}", output.display());
        }
    }
    Ok(())
}

pub fn cmd_show_config(args: &ShowConfigArgs) -> Result<()> {
    let mut config = args.common.resolve()?;
    args.depth.apply(&mut config);
    if let Some(m) = args.mode {
        config.mode = m;
    }
    config.validate()?;
    print!("{}", config.to_toml()?);
    Ok(())
}
