//! Command-line surface. Flags override the config file or preset, which
//! override the built-in defaults.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use quatpaint_core::depth::DepthRescale;
use quatpaint_core::{Polarity, RealPart};

use crate::config::{DepthSource, Mode, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "quatpaint", version, about = "Color image inpainting by low-rank quaternion matrix completion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mask a random fraction of pixels; writes masked.png and mask.png.
    Mask(MaskArgs),
    /// Restore a masked image; writes restored.png and report.json.
    Inpaint(InpaintArgs),
    /// Score a directory of ground-truth images; writes results.csv and summary.json.
    Benchmark(BenchmarkArgs),
    /// Print PSNR and SSIM of a test image against a reference.
    Metrics(MetricsArgs),
    /// Minimal depth estimator following the external-command contract.
    DepthProxy(DepthProxyArgs),
    /// Generate synthetic images with known ground truth.
    Synth(SynthArgs),
    /// Print the effective configuration as TOML.
    ShowConfig(ShowConfigArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in preset: missing-10, missing-30 or missing-50.
    #[arg(long)]
    pub preset: Option<String>,
    /// Fraction of pixels to mask, in [0, 1].
    #[arg(long)]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Factorization rank K.
    #[arg(short = 'K', long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(short, long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolarityArg {
    White,
    Black,
}

impl From<PolarityArg> for Polarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::White => Polarity::WhiteBackground,
            PolarityArg::Black => Polarity::BlackBackground,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RescaleArg {
    Fixed,
    Minmax,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RealPartArg {
    FollowMask,
    AlwaysObserved,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DepthArgs {
    #[arg(long, value_enum)]
    pub depth_kind: Option<DepthSource>,
    /// Depth map PNG for the input image.
    #[arg(long)]
    pub depth_file: Option<PathBuf>,
    /// Directory of depth maps named after each image.
    #[arg(long)]
    pub depth_dir: Option<PathBuf>,
    /// Estimator command line, invoked as `<cmd> <input.png> <output.png>`.
    #[arg(long)]
    pub depth_cmd: Option<String>,
    /// Polarity the depth provider produces.
    #[arg(long, value_enum)]
    pub polarity: Option<PolarityArg>,
    /// Convert the provider's map to this polarity before injection.
    #[arg(long, value_enum)]
    pub target_polarity: Option<PolarityArg>,
    #[arg(long, value_enum)]
    pub depth_rescale: Option<RescaleArg>,
    /// Constraint on the quaternion real part in the second pass.
    #[arg(long, value_enum)]
    pub real_part: Option<RealPartArg>,
    /// Use the first-pass seed again in the second pass.
    #[arg(long)]
    pub reuse_seed: bool,
}

#[derive(Debug, Args)]
pub struct MaskArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct InpaintArgs {
    /// Image to restore. Pixels outside the mask are ignored.
    pub input: Option<PathBuf>,
    /// Mask PNG (0 = missing, 255 = observed). Generated from --fraction and --seed if absent.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Ground-truth image; enables scores in the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Also write x0.png, depth.png and masked.png.
    #[arg(long)]
    pub intermediates: bool,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Directory of ground-truth images (.png or .ppm).
    pub images: Option<PathBuf>,
    /// Maximum number of images processed at once.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub depth: DepthArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub reference: PathBuf,
    pub test: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProxyKind {
    /// Rec. 601 luminance of the input.
    Luminance,
    /// All-zero map.
    Zero,
    /// Builtin row-ramp and luminance blend.
    Heuristic,
}

#[derive(Debug, Args)]
pub struct DepthProxyArgs {
    #[arg(long, value_enum, default_value = "luminance")]
    pub kind: ProxyKind,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub what: SynthKind,
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Piecewise-constant layered scenes with ground-truth depth
    /// (images/ and depth/, black background).
    Scenes {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 96)]
        rows: usize,
        #[arg(long, default_value_t = 96)]
        cols: usize,
        #[arg(long, default_value_t = 5)]
        layers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Exactly low-rank color image.
    LowRank {
        #[arg(long, default_value_t = 40)]
        rows: usize,
        #[arg(long, default_value_t = 40)]
        cols: usize,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ShowConfigArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub depth: DepthArgs,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = RunConfig::base(self.config.as_deref(), self.preset.as_deref())?;
        if let Some(v) = self.fraction {
            c.missing_fraction = v;
        }
        if let Some(v) = self.seed {
            c.solver.seed = v;
        }
        if let Some(v) = self.rank {
            c.solver.rank = v;
        }
        if let Some(v) = self.lambda {
            c.solver.lambda = v;
        }
        if let Some(v) = self.max_iters {
            c.solver.max_iters = v;
        }
        if let Some(v) = self.rel_tol {
            c.solver.rel_tol = v;
        }
        if let Some(v) = &self.out_dir {
            c.output_dir = Some(v.clone());
        }
        Ok(c)
    }
}

impl DepthArgs {
    pub fn apply(&self, c: &mut RunConfig) {
        let d = &mut c.depth;
        if let Some(k) = self.depth_kind {
            d.kind = Some(k);
        }
        if let Some(p) = &self.depth_file {
            d.path = Some(p.clone());
        }
        if let Some(p) = &self.depth_dir {
            d.dir = Some(p.clone());
        }
        if let Some(cmd) = &self.depth_cmd {
            d.command = Some(cmd.clone());
        }
        if let Some(p) = self.polarity {
            d.polarity = Some(p.into());
        }
        if let Some(p) = self.target_polarity {
            d.target_polarity = Some(p.into());
        }
        if let Some(r) = self.depth_rescale {
            d.rescale = match r {
                RescaleArg::Fixed => DepthRescale::Fixed,
                RescaleArg::Minmax => DepthRescale::MinMax,
            };
        }
        if let Some(r) = self.real_part {
            c.real_part = match r {
                RealPartArg::FollowMask => RealPart::FollowMask,
                RealPartArg::AlwaysObserved => RealPart::AlwaysObserved,
            };
        }
        if self.reuse_seed {
            c.reuse_seed = true;
        }
    }
}
