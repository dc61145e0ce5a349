//! Corpus benchmark: one baseline and two depth-aided runs per image, one for
//! each depth polarity, written as CSV plus a summary of improvement counts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use quatpaint_core::depth::{apply_polarity, estimate_depth};
use quatpaint_core::imaging::io::{read_rgb, to_rgb8_bytes};
use quatpaint_core::imaging::{apply_mask, metrics::delta_scores, metrics::SSIM_CONVENTION};
use quatpaint_core::pipeline::complete_with_depth;
use quatpaint_core::{
    decode_quaternion, encode_quaternion, gen_mask, run_lrqmc, seeded_rng, PipelineOptions, Polarity, ScorePair,
    SolverParams,
};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Mode, RunConfig};
use crate::report::format_score;

/// Stable column order of `results.csv`.
pub const CSV_HEADER: [&str; 12] = [
    "image_id",
    "mode",
    "polarity",
    "psnr",
    "ssim",
    "delta_psnr",
    "delta_ssim",
    "iterations",
    "first_pass_s",
    "depth_s",
    "second_pass_s",
    "error",
];

pub const ARMS: [Polarity; 2] = [Polarity::WhiteBackground, Polarity::BlackBackground];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub image_id: String,
    pub mode: Mode,
    /// `None` for the single-pass baseline.
    pub polarity: Option<Polarity>,
    pub scores: Option<ScorePair>,
    /// Depth-aided minus baseline; depth-aided rows only.
    pub deltas: Option<(f64, f64)>,
    pub iterations: Option<usize>,
    pub first_pass_s: Option<f64>,
    pub depth_s: Option<f64>,
    pub second_pass_s: Option<f64>,
    pub error: Option<String>,
}

impl BenchmarkRecord {
    fn failed(image_id: &str, mode: Mode, polarity: Option<Polarity>, error: String) -> Self {
        BenchmarkRecord {
            image_id: image_id.to_owned(),
            mode,
            polarity,
            scores: None,
            deltas: None,
            iterations: None,
            first_pass_s: None,
            depth_s: None,
            second_pass_s: None,
            error: Some(error),
        }
    }

    pub fn csv_row(&self) -> [String; 12] {
        let opt = |v: Option<f64>, f: fn(f64) -> String| v.map(f).unwrap_or_default();
        let secs = |v: f64| format!("{v:.3}");
        [
            self.image_id.clone(),
            self.mode.as_str().to_owned(),
            self.polarity.map(|p| p.as_str()).unwrap_or("none").to_owned(),
            opt(self.scores.map(|s| s.psnr), format_score),
            opt(self.scores.map(|s| s.ssim), format_score),
            opt(self.deltas.map(|d| d.0), format_score),
            opt(self.deltas.map(|d| d.1), format_score),
            self.iterations.map(|n| n.to_string()).unwrap_or_default(),
            opt(self.first_pass_s, secs),
            opt(self.depth_s, secs),
            opt(self.second_pass_s, secs),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Mask and solver seed for one image, derived from the global seed and the
/// pixel content. Identical images get identical masks wherever they sit in
/// the corpus, while distinct images get unrelated masks.
pub fn image_seed(global: u64, rgb8: &[u8]) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(rgb8);
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// PNG and PPM files directly inside `dir`, sorted by file name.
pub fn discover_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("png" | "ppm")) {
            out.push(path);
        }
    }
    out.sort();
    if out.is_empty() {
        bail!("no .png or .ppm images in {}", dir.display());
    }
    Ok(out)
}

pub fn image_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Runs the three arms for one ground-truth image. Failures are recorded in
/// the rows rather than returned.
pub fn process_image(path: &Path, config: &RunConfig) -> Vec<BenchmarkRecord> {
    let id = image_id(path);
    let all_failed = |msg: String| {
        let mut rows = vec![BenchmarkRecord::failed(&id, Mode::Lrqmc, None, msg.clone())];
        rows.extend(ARMS.iter().map(|&p| BenchmarkRecord::failed(&id, Mode::Dlrqmc, Some(p), msg.clone())));
        rows
    };

    let truth = match read_rgb(path) {
        Ok(img) => img,
        Err(e) => return all_failed(e.to_string()),
    };
    let seed = image_seed(config.solver.seed, &to_rgb8_bytes(&truth));
    let (rows, cols) = truth.shape();
    let mask = match gen_mask(&mut seeded_rng(seed), rows, cols, config.missing_fraction) {
        Ok(m) => m,
        Err(e) => return all_failed(e.to_string()),
    };
    let observed = match apply_mask(&truth, &mask) {
        Ok(o) => o,
        Err(e) => return all_failed(e.to_string()),
    };
    let y = encode_quaternion(&observed);
    let params = SolverParams { seed, ..config.solver };

    let start = Instant::now();
    let (x0, trace1) = match run_lrqmc(&y, &mask, &params) {
        Ok(r) => r,
        Err(e) => return all_failed(format!("first completion pass: {e}")),
    };
    let first_pass_s = start.elapsed().as_secs_f64();
    let x0_image = decode_quaternion(&x0);
    let baseline = match ScorePair::compute(&truth, &x0_image) {
        Ok(s) => s,
        Err(e) => return all_failed(e.to_string()),
    };
    let mut rows = vec![BenchmarkRecord {
        image_id: id.clone(),
        mode: Mode::Lrqmc,
        polarity: None,
        scores: Some(baseline),
        deltas: None,
        iterations: Some(trace1.iterations),
        first_pass_s: Some(first_pass_s),
        depth_s: None,
        second_pass_s: None,
        error: None,
    }];

    let start = Instant::now();
    let raw = config
        .depth
        .provider(Some(&id))
        .and_then(|spec| estimate_depth(&spec, &x0_image).map_err(anyhow::Error::from));
    let depth_s = start.elapsed().as_secs_f64();
    let raw = match raw {
        Ok(d) => d,
        Err(e) => {
            let msg = format!("depth estimation: {e:#}");
            rows.extend(ARMS.iter().map(|&p| BenchmarkRecord::failed(&id, Mode::Dlrqmc, Some(p), msg.clone())));
            return rows;
        }
    };

    let options = PipelineOptions {
        target_polarity: None,
        real_part: config.real_part,
        reuse_seed: config.reuse_seed,
    };
    for polarity in ARMS {
        let depth = apply_polarity(&raw, polarity);
        let start = Instant::now();
        let outcome = complete_with_depth(&y, &mask, &params, &depth, &options).and_then(|(_, xd, trace)| {
            let scores = ScorePair::compute(&truth, &decode_quaternion(&xd))?;
            Ok((scores, trace))
        });
        let second_pass_s = start.elapsed().as_secs_f64();
        rows.push(match outcome {
            Ok((scores, trace)) => BenchmarkRecord {
                image_id: id.clone(),
                mode: Mode::Dlrqmc,
                polarity: Some(polarity),
                scores: Some(scores),
                deltas: Some(delta_scores(baseline, scores)),
                iterations: Some(trace.iterations),
                first_pass_s: Some(first_pass_s),
                depth_s: Some(depth_s),
                second_pass_s: Some(second_pass_s),
                error: None,
            },
            Err(e) => BenchmarkRecord::failed(&id, Mode::Dlrqmc, Some(polarity), e.to_string()),
        });
    }
    rows
}

/// Processes every image with at most `config.jobs` workers. Rows come back
/// ordered by image id, then baseline, white, black.
pub fn run_benchmark(images: &[PathBuf], config: &RunConfig) -> Result<Vec<BenchmarkRecord>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().context("building worker pool")?;
    let mut per_image: Vec<Vec<BenchmarkRecord>> =
        pool.install(|| images.par_iter().map(|p| process_image(p, config)).collect());
    per_image.sort_by(|a, b| a[0].image_id.cmp(&b[0].image_id));
    Ok(per_image.into_iter().flatten().collect())
}

pub fn write_csv(path: &Path, records: &[BenchmarkRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// `count` of `total`, kept as integers; `value` is for convenience only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fraction {
    pub count: usize,
    pub total: usize,
    pub value: f64,
}

impl Fraction {
    pub fn new(count: usize, total: usize) -> Self {
        let value = if total == 0 { 0.0 } else { count as f64 / total as f64 };
        Fraction { count, total, value }
    }

    fn of(deltas: impl Iterator<Item = f64> + Clone) -> Self {
        Fraction::new(deltas.clone().filter(|d| *d > 0.0).count(), deltas.count())
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.count, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSummary {
    pub delta_psnr_positive: Fraction,
    pub delta_ssim_positive: Fraction,
    pub mean_delta_psnr: Option<f64>,
    pub mean_delta_ssim: Option<f64>,
}

impl ArmSummary {
    fn from_deltas(deltas: &[(f64, f64)]) -> Self {
        let mean = |f: fn(&(f64, f64)) -> f64| {
            (!deltas.is_empty()).then(|| deltas.iter().map(f).sum::<f64>() / deltas.len() as f64)
        };
        ArmSummary {
            delta_psnr_positive: Fraction::of(deltas.iter().map(|d| d.0)),
            delta_ssim_positive: Fraction::of(deltas.iter().map(|d| d.1)),
            mean_delta_psnr: mean(|d| d.0),
            mean_delta_ssim: mean(|d| d.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub images: usize,
    pub failed_records: usize,
    pub white: ArmSummary,
    pub black: ArmSummary,
    /// Per image and per metric, the better of the two polarity arms. Only
    /// images where both arms finished are counted.
    pub best_of_two: ArmSummary,
}

pub fn summarize(records: &[BenchmarkRecord]) -> Summary {
    let arm = |p: Polarity| -> Vec<(String, (f64, f64))> {
        records
            .iter()
            .filter(|r| r.mode == Mode::Dlrqmc && r.polarity == Some(p))
            .filter_map(|r| r.deltas.map(|d| (r.image_id.clone(), d)))
            .collect()
    };
    let white = arm(Polarity::WhiteBackground);
    let black = arm(Polarity::BlackBackground);
    let best: Vec<(f64, f64)> = white
        .iter()
        .filter_map(|(id, w)| {
            black
                .iter()
                .find(|(other, _)| other == id)
                .map(|(_, b)| (w.0.max(b.0), w.1.max(b.1)))
        })
        .collect();
    let mut ids: Vec<&str> = records.iter().map(|r| r.image_id.as_str()).collect();
    ids.dedup();
    let just = |v: &[(String, (f64, f64))]| v.iter().map(|x| x.1).collect::<Vec<_>>();
    Summary {
        images: ids.len(),
        failed_records: records.iter().filter(|r| r.error.is_some()).count(),
        white: ArmSummary::from_deltas(&just(&white)),
        black: ArmSummary::from_deltas(&just(&black)),
        best_of_two: ArmSummary::from_deltas(&best),
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryFile<'a> {
    pub summary: &'a Summary,
    pub missing_fraction: f64,
    pub solver: SolverParams,
    pub depth_provider: String,
    pub depth_proxy: bool,
    pub csv_columns: [&'static str; 12],
    pub ssim_convention: &'static str,
}

impl<'a> SummaryFile<'a> {
    pub fn new(summary: &'a Summary, config: &RunConfig) -> Self {
        let spec = config.depth.provider(None);
        SummaryFile {
            summary,
            missing_fraction: config.missing_fraction,
            solver: config.solver,
            depth_provider: describe_provider(config),
            depth_proxy: spec.map(|s| s.is_proxy()).unwrap_or(false),
            csv_columns: CSV_HEADER,
            ssim_convention: SSIM_CONVENTION,
        }
    }
}

pub fn describe_provider(config: &RunConfig) -> String {
    use crate::config::DepthSource;
    let d = &config.depth;
    match d.source() {
        DepthSource::Heuristic => "heuristic proxy (row ramp blended with luminance)".into(),
        DepthSource::File => match (&d.dir, &d.path) {
            (Some(dir), _) => format!("files under {}", dir.display()),
            (None, Some(p)) => format!("file {}", p.display()),
            _ => "file".into(),
        },
        DepthSource::Command => match &d.command {
            Some(c) => format!("command `{c}`"),
            None => format!("command from {}", quatpaint_core::depth::DEPTH_CMD_ENV),
        },
    }
}
