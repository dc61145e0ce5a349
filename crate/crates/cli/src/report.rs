//! JSON report for a single inpainting run.

use quatpaint_core::imaging::metrics::SSIM_CONVENTION;
use quatpaint_core::{ScorePair, SolverParams, SolverTrace};
use serde::{Serialize, Serializer};

/// JSON has no infinity, so non-finite scores are written as strings.
pub fn finite_or_string<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&format_score(*v))
    }
}

/// Text form used in CSV and JSON: `inf`, `-inf`, `nan` or the number.
pub fn format_score(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.6}")
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Scores {
    #[serde(serialize_with = "finite_or_string")]
    pub psnr: f64,
    pub ssim: f64,
}

impl From<ScorePair> for Scores {
    fn from(p: ScorePair) -> Self {
        Scores { psnr: p.psnr, ssim: p.ssim }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Deltas {
    #[serde(serialize_with = "finite_or_string")]
    pub delta_psnr: f64,
    #[serde(serialize_with = "finite_or_string")]
    pub delta_ssim: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaskSummary {
    pub rows: usize,
    pub cols: usize,
    pub missing: usize,
    /// Where the mask came from: a file path or `generated`.
    pub source: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DepthSummary {
    pub provider: String,
    /// True for the builtin heuristic, which only stands in for a real estimator.
    pub proxy: bool,
    pub native_polarity: String,
    pub injected_polarity: String,
    pub time_s: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScoreBlock {
    /// Single-pass restoration (the first pass in depth-aided mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lrqmc: Option<Scores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dlrqmc: Option<Scores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Deltas>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InpaintReport {
    pub mode: String,
    pub input: String,
    pub solver: SolverParams,
    pub real_part: quatpaint_core::RealPart,
    pub reuse_seed: bool,
    pub mask: MaskSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<DepthSummary>,
    pub first_pass: SolverTrace,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_pass: Option<SolverTrace>,
    /// Present only when a ground-truth image was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<ScoreBlock>,
    pub ssim_convention: &'static str,
}

impl InpaintReport {
    pub fn ssim_convention() -> &'static str {
        SSIM_CONVENTION
    }
}
