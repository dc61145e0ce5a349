//! Depth-map acquisition.
//!
//! Three providers are supported:
//! - a grayscale PNG on disk,
//! - an external monocular estimator run as
//!   `<program> <args...> <input.png> <output.png>`, which must write an 8- or
//!   16-bit single-channel PNG of the input's size,
//! - a builtin proxy (row ramp blended with luma) so the pipeline can run
//!   without an estimator. It is a stand-in, not a depth estimate.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::io::{read_gray, write_png, GrayPlane};
use crate::imaging::RgbImage;

/// Environment variable holding a default external estimator command line.
pub const DEPTH_CMD_ENV: &str = "QUATPAINT_DEPTH_CMD";

/// Whether far objects are bright or dark in a depth map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Far objects appear bright (close to 255).
    #[serde(alias = "white")]
    WhiteBackground,
    /// Far objects appear dark (close to 0).
    #[serde(alias = "black")]
    BlackBackground,
}

impl Polarity {
    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::WhiteBackground => Polarity::BlackBackground,
            Polarity::BlackBackground => Polarity::WhiteBackground,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::WhiteBackground => "white",
            Polarity::BlackBackground => "black",
        }
    }
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "white" | "white_background" => Ok(Polarity::WhiteBackground),
            "black" | "black_background" => Ok(Polarity::BlackBackground),
            other => Err(Error::InvalidParameter(format!(
                "unknown polarity {other:?} (expected white or black)"
            ))),
        }
    }
}

/// Grayscale depth map with values in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    polarity: Polarity,
}

impl DepthMap {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, polarity: Polarity) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} depth values", rows * cols),
                actual: format!("{}", values.len()),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=255.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!("depth value {v} outside [0, 255]")));
        }
        Ok(DepthMap {
            rows,
            cols,
            values,
            polarity,
        })
    }

    pub fn zeros(rows: usize, cols: usize, polarity: Polarity) -> Self {
        DepthMap {
            rows,
            cols,
            values: vec![0.0; rows * cols],
            polarity,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }
}

/// How provider output is mapped onto `[0, 255]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthRescale {
    /// 8-bit values as-is, 16-bit values scaled by 255/65535.
    #[default]
    Fixed,
    /// Per-image min-max stretch to the full range.
    MinMax,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DepthKind {
    File { path: PathBuf },
    Command { program: String, args: Vec<String> },
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthProviderSpec {
    #[serde(flatten)]
    pub kind: DepthKind,
    /// Polarity of the maps this provider produces. The builtin proxy always
    /// produces [`Polarity::BlackBackground`].
    pub polarity: Polarity,
    #[serde(default)]
    pub rescale: DepthRescale,
}

impl DepthProviderSpec {
    pub fn file(path: impl Into<PathBuf>, polarity: Polarity) -> Self {
        DepthProviderSpec {
            kind: DepthKind::File { path: path.into() },
            polarity,
            rescale: DepthRescale::Fixed,
        }
    }

    pub fn command(program: impl Into<String>, args: Vec<String>, polarity: Polarity) -> Self {
        DepthProviderSpec {
            kind: DepthKind::Command {
                program: program.into(),
                args,
            },
            polarity,
            rescale: DepthRescale::Fixed,
        }
    }

    pub fn heuristic() -> Self {
        DepthProviderSpec {
            kind: DepthKind::Heuristic,
            polarity: Polarity::BlackBackground,
            rescale: DepthRescale::Fixed,
        }
    }

    /// Command provider parsed from a whitespace-separated command line.
    pub fn from_command_line(line: &str, polarity: Polarity) -> Result<Self> {
        let mut parts = line.split_whitespace().map(str::to_owned);
        let program = parts
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty depth command".into()))?;
        Ok(Self::command(program, parts.collect(), polarity))
    }

    /// Command provider from `QUATPAINT_DEPTH_CMD`, if set and non-empty.
    pub fn from_env(polarity: Polarity) -> Option<Result<Self>> {
        let line = std::env::var(DEPTH_CMD_ENV).ok()?;
        if line.trim().is_empty() {
            return None;
        }
        Some(Self::from_command_line(&line, polarity))
    }

    pub fn is_proxy(&self) -> bool {
        matches!(self.kind, DepthKind::Heuristic)
    }
}

fn rescale(values: Vec<f64>, mode: DepthRescale) -> Vec<f64> {
    match mode {
        DepthRescale::Fixed => values,
        DepthRescale::MinMax => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(hi > lo) {
                return vec![0.0; values.len()];
            }
            values.into_iter().map(|v| (v - lo) * 255.0 / (hi - lo)).collect()
        }
    }
}

fn plane_to_map(plane: GrayPlane, image: &RgbImage, spec: &DepthProviderSpec, origin: &str) -> Result<DepthMap> {
    if (plane.rows, plane.cols) != image.shape() {
        return Err(Error::provider(format!(
            "{origin}: depth map is {}x{}, image is {}x{}",
            plane.rows,
            plane.cols,
            image.rows(),
            image.cols()
        )));
    }
    let values = rescale(plane.values, spec.rescale);
    DepthMap::new(plane.rows, plane.cols, values, spec.polarity)
        .map_err(|e| Error::provider(format!("{origin}: {e}")))
}

fn run_command(
    program: &str,
    args: &[String],
    image: &RgbImage,
    spec: &DepthProviderSpec,
    tmp_root: Option<&Path>,
) -> Result<DepthMap> {
    let mut builder = tempfile::Builder::new();
    builder.prefix("quatpaint-depth-");
    let dir = match tmp_root {
        Some(root) => builder.tempdir_in(root),
        None => builder.tempdir(),
    }
    .map_err(|e| Error::provider(format!("cannot create temporary directory: {e}")))?;
    let input = dir.path().join("input.png");
    let output = dir.path().join("output.png");
    write_png(&input, image).map_err(|e| Error::provider(format!("writing estimator input: {e}")))?;

    let out = Command::new(program)
        .args(args)
        .arg(&input)
        .arg(&output)
        .output()
        .map_err(|e| Error::provider(format!("cannot run {program:?}: {e}")))?;
    if !out.status.success() {
        return Err(Error::provider(format!(
            "{program:?} exited with {}; stderr: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    let plane = read_gray(&output).map_err(|e| Error::provider(format!("{program:?} output: {e}")))?;
    plane_to_map(plane, image, spec, program)
    // `dir` is removed on drop, on every return path above.
}

/// Produces a depth map of the image's size from the configured provider.
pub fn estimate_depth(spec: &DepthProviderSpec, image: &RgbImage) -> Result<DepthMap> {
    estimate_depth_in(spec, image, None)
}

/// As [`estimate_depth`], placing command-provider scratch files under
/// `tmp_root` instead of the system temporary directory.
pub fn estimate_depth_in(spec: &DepthProviderSpec, image: &RgbImage, tmp_root: Option<&Path>) -> Result<DepthMap> {
    if image.is_empty() {
        return Err(Error::provider("cannot estimate depth of an empty image"));
    }
    match &spec.kind {
        DepthKind::File { path } => {
            let plane = read_gray(path).map_err(|e| Error::provider(e.to_string()))?;
            plane_to_map(plane, image, spec, &path.display().to_string())
        }
        DepthKind::Command { program, args } => run_command(program, args, image, spec, tmp_root),
        DepthKind::Heuristic => Ok(heuristic_depth(image)),
    }
}

/// Builtin proxy: `0.5·255·m/(M−1) + 0.5·luma`, clamped. Row 0 maps to 0, so
/// the top of the frame reads as far in a black-background map.
pub fn heuristic_depth(image: &RgbImage) -> DepthMap {
    let (m, n) = image.shape();
    let luma = image.luminance();
    let values = (0..m * n)
        .map(|k| {
            let row = k / n;
            let ramp = if m > 1 {
                255.0 * row as f64 / (m - 1) as f64
            } else {
                0.0
            };
            (0.5 * ramp + 0.5 * luma[k]).clamp(0.0, 255.0)
        })
        .collect();
    DepthMap {
        rows: m,
        cols: n,
        values,
        polarity: Polarity::BlackBackground,
    }
}

/// Converts a map to the requested polarity (`d → 255 − d` when they differ).
pub fn apply_polarity(depth: &DepthMap, target: Polarity) -> DepthMap {
    if depth.polarity == target {
        return depth.clone();
    }
    DepthMap {
        rows: depth.rows,
        cols: depth.cols,
        values: depth.values.iter().map(|v| 255.0 - v).collect(),
        polarity: target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::io::write_gray;

    fn gray_image(rows: usize, cols: usize, v: f64) -> RgbImage {
        RgbImage::constant(rows, cols, [v; 3]).unwrap()
    }

    #[test]
    fn file_provider_passes_values_through() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.png");
        let values: Vec<f64> = (0..12).map(|v| (v * 20) as f64).collect();
        write_gray(&path, 3, 4, &values).unwrap();
        let spec = DepthProviderSpec::file(&path, Polarity::WhiteBackground);
        let d = estimate_depth(&spec, &gray_image(3, 4, 10.0)).unwrap();
        assert_eq!(d.values(), values.as_slice());
        assert_eq!(d.polarity(), Polarity::WhiteBackground);

        let err = estimate_depth(&spec, &gray_image(4, 4, 10.0)).unwrap_err();
        assert!(matches!(err, Error::ProviderFailure { .. }));
        let missing = DepthProviderSpec::file(dir.path().join("nope.png"), Polarity::WhiteBackground);
        assert!(matches!(estimate_depth(&missing, &gray_image(3, 4, 0.0)), Err(Error::ProviderFailure { .. })));
    }

    #[test]
    fn min_max_rescale() {
        assert_eq!(rescale(vec![10.0, 20.0, 30.0], DepthRescale::MinMax), vec![0.0, 127.5, 255.0]);
        assert_eq!(rescale(vec![7.0, 7.0], DepthRescale::MinMax), vec![0.0, 0.0]);
    }

    #[cfg(unix)]
    #[test]
    fn command_provider_errors() {
        let dir = tempfile::tempdir().unwrap();
        let wrong = dir.path().join("wrong.png");
        write_gray(&wrong, 2, 2, &[0.0; 4]).unwrap();
        let img = gray_image(3, 3, 50.0);

        let sized = DepthProviderSpec::command(
            "sh",
            vec!["-c".into(), format!("cp {} \"$2\"", wrong.display()), "stub".into()],
            Polarity::BlackBackground,
        );
        assert!(matches!(estimate_depth(&sized, &img), Err(Error::ProviderFailure { .. })));

        let failing = DepthProviderSpec::command(
            "sh",
            vec!["-c".into(), "echo boom >&2; exit 3".into(), "stub".into()],
            Polarity::BlackBackground,
        );
        let msg = estimate_depth(&failing, &img).unwrap_err().to_string();
        assert!(msg.contains("boom"), "{msg}");

        // An RGB output violates the single-channel contract.
        let rgb_copy = DepthProviderSpec::command(
            "sh",
            vec!["-c".into(), "cp \"$1\" \"$2\"".into(), "stub".into()],
            Polarity::BlackBackground,
        );
        assert!(matches!(estimate_depth(&rgb_copy, &img), Err(Error::ProviderFailure { .. })));

        let absent = DepthProviderSpec::command("/definitely/not/here", vec![], Polarity::BlackBackground);
        assert!(matches!(estimate_depth(&absent, &img), Err(Error::ProviderFailure { .. })));

        let scratch = tempfile::tempdir().unwrap();
        for spec in [&sized, &failing, &rgb_copy, &absent] {
            assert!(estimate_depth_in(spec, &img, Some(scratch.path())).is_err());
        }
        assert_eq!(std::fs::read_dir(scratch.path()).unwrap().count(), 0);
    }

    #[cfg(unix)]
    #[test]
    fn command_provider_reads_output() {
        let dir = tempfile::tempdir().unwrap();
        let canned = dir.path().join("canned.png");
        let values: Vec<f64> = (0..9).map(|v| (v * 25) as f64).collect();
        write_gray(&canned, 3, 3, &values).unwrap();
        let spec = DepthProviderSpec::command(
            "sh",
            vec!["-c".into(), format!("test -f \"$1\" && cp {} \"$2\"", canned.display()), "stub".into()],
            Polarity::WhiteBackground,
        );
        let scratch = tempfile::tempdir().unwrap();
        let d = estimate_depth_in(&spec, &gray_image(3, 3, 1.0), Some(scratch.path())).unwrap();
        assert_eq!(d.values(), values.as_slice());
        assert_eq!(std::fs::read_dir(scratch.path()).unwrap().count(), 0);
    }

    #[test]
    fn heuristic_cases() {
        let one_row = RgbImage::from_fn(1, 3, |_, j| [j as f64 * 100.0; 3]).unwrap();
        let d = heuristic_depth(&one_row);
        for (v, l) in d.values().iter().zip(one_row.luminance()) {
            assert!((v - l / 2.0).abs() < 1e-12);
        }

        let mid = heuristic_depth(&gray_image(3, 2, 127.5));
        let expected = [63.75, 127.5, 191.25];
        for (row, e) in expected.iter().enumerate() {
            for col in 0..2 {
                assert!((mid.values()[row * 2 + col] - e).abs() < 1e-9);
            }
        }

        let bright = heuristic_depth(&gray_image(5, 5, 255.0));
        assert!(bright.values().iter().all(|v| (0.0..=255.0).contains(v)));
    }

    #[test]
    fn polarity_flip() {
        let d = DepthMap::new(1, 3, vec![0.0, 100.0, 255.0], Polarity::BlackBackground).unwrap();
        assert_eq!(apply_polarity(&d, Polarity::BlackBackground), d);
        let f = apply_polarity(&d, Polarity::WhiteBackground);
        assert_eq!(f.values(), &[255.0, 155.0, 0.0]);
        assert_eq!(f.polarity(), Polarity::WhiteBackground);
        assert_eq!(apply_polarity(&f, Polarity::BlackBackground), d);
    }

    #[test]
    fn depth_map_range_is_enforced() {
        assert!(DepthMap::new(1, 1, vec![256.0], Polarity::BlackBackground).is_err());
        assert!(DepthMap::new(1, 2, vec![0.0], Polarity::BlackBackground).is_err());
    }

    #[test]
    fn spec_serde_and_parsing() {
        let spec = DepthProviderSpec::from_command_line("python3 est.py --fast", Polarity::WhiteBackground).unwrap();
        assert_eq!(
            spec.kind,
            DepthKind::Command {
                program: "python3".into(),
                args: vec!["est.py".into(), "--fast".into()]
            }
        );
        assert!(DepthProviderSpec::from_command_line("   ", Polarity::WhiteBackground).is_err());
        assert_eq!("White".parse::<Polarity>().unwrap(), Polarity::WhiteBackground);
        assert!("grey".parse::<Polarity>().is_err());
    }
}
