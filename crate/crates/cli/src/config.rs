//! Run configuration: defaults, presets, TOML files and command-line
//! overrides, validated before any computation starts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quatpaint_core::depth::DepthRescale;
use quatpaint_core::{DepthProviderSpec, Polarity, RealPart, SolverParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lrqmc,
    #[default]
    Dlrqmc,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Lrqmc => "lrqmc",
            Mode::Dlrqmc => "dlrqmc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DepthSource {
    File,
    Command,
    Heuristic,
}

/// Depth provider settings. With no explicit `kind`, a command line wins over
/// a file or directory, then `QUATPAINT_DEPTH_CMD`, then the builtin proxy.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DepthConfig {
    pub kind: Option<DepthSource>,
    /// Depth map for a single image.
    pub path: Option<PathBuf>,
    /// Benchmark depth maps, looked up as `<dir>/<image stem>.png`.
    pub dir: Option<PathBuf>,
    /// External estimator command line, whitespace separated.
    pub command: Option<String>,
    /// Polarity the provider produces. The builtin proxy is always black.
    pub polarity: Option<Polarity>,
    pub rescale: DepthRescale,
    /// Convert the provider's map to this polarity before injection.
    pub target_polarity: Option<Polarity>,
}

impl DepthConfig {
    pub fn source(&self) -> DepthSource {
        if let Some(k) = self.kind {
            return k;
        }
        if self.command.is_some() {
            DepthSource::Command
        } else if self.path.is_some() || self.dir.is_some() {
            DepthSource::File
        } else if std::env::var(quatpaint_core::depth::DEPTH_CMD_ENV).is_ok_and(|v| !v.trim().is_empty()) {
            DepthSource::Command
        } else {
            DepthSource::Heuristic
        }
    }

    fn native_polarity(&self) -> Polarity {
        self.polarity.unwrap_or(Polarity::BlackBackground)
    }

    /// Provider for one image; `stem` selects the file under `dir`.
    pub fn provider(&self, stem: Option<&str>) -> Result<DepthProviderSpec> {
        let polarity = self.native_polarity();
        let mut spec = match self.source() {
            DepthSource::Heuristic => return Ok(DepthProviderSpec::heuristic()),
            DepthSource::File => {
                let path = match (&self.path, &self.dir, stem) {
                    (_, Some(dir), Some(stem)) => dir.join(format!("{stem}.png")),
                    (Some(p), _, _) => p.clone(),
                    _ => bail!("file depth needs depth.path (or depth.dir for benchmarks)"),
                };
                DepthProviderSpec::file(path, polarity)
            }
            DepthSource::Command => match &self.command {
                Some(line) => DepthProviderSpec::from_command_line(line, polarity)?,
                None => match DepthProviderSpec::from_env(polarity) {
                    Some(spec) => spec?,
                    None => bail!(
                        "command depth needs depth.command or {}",
                        quatpaint_core::depth::DEPTH_CMD_ENV
                    ),
                },
            },
        };
        spec.rescale = self.rescale;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub mode: Mode,
    pub missing_fraction: f64,
    pub solver: SolverParams,
    pub depth: DepthConfig,
    pub real_part: RealPart,
    /// Reuse the first-pass seed in the second pass instead of `seed + 1`.
    pub reuse_seed: bool,
    /// Benchmark worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            output_dir: None,
            mode: Mode::default(),
            missing_fraction: 0.3,
            solver: SolverParams::default(),
            depth: DepthConfig::default(),
            real_part: RealPart::default(),
            reuse_seed: false,
            jobs: None,
        }
    }
}

/// Shipped presets for the 10%, 30% and 50% missing-pixel settings.
pub const PRESETS: [(&str, &str); 3] = [
    ("missing-10", include_str!("../presets/missing-10.toml")),
    ("missing-30", include_str!("../presets/missing-30.toml")),
    ("missing-50", include_str!("../presets/missing-50.toml")),
];

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn preset(name: &str) -> Result<Self> {
        match PRESETS.iter().find(|(n, _)| *n == name) {
            Some((_, text)) => Self::from_toml(text),
            None => {
                let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
                bail!("unknown preset {name:?}; available: {}", names.join(", "))
            }
        }
    }

    /// Base configuration: a config file if given, else a preset, else defaults.
    pub fn base(config: Option<&Path>, preset: Option<&str>) -> Result<Self> {
        match (config, preset) {
            (Some(_), Some(_)) => bail!("--config and --preset are mutually exclusive"),
            (Some(path), None) => Self::load(path),
            (None, Some(name)) => Self::preset(name),
            (None, None) => Ok(Self::default()),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.missing_fraction) {
            bail!("missing_fraction must lie in [0, 1], got {}", self.missing_fraction);
        }
        self.solver.validate()?;
        if self.jobs == Some(0) {
            bail!("jobs must be at least 1");
        }
        if let Some(DepthSource::File) = self.depth.kind {
            if self.depth.path.is_none() && self.depth.dir.is_none() {
                bail!("depth.kind = \"file\" needs depth.path or depth.dir");
            }
        }
        if let Some(line) = &self.depth.command {
            if line.trim().is_empty() {
                bail!("depth.command is empty");
            }
        }
        Ok(())
    }
}
