//! Two-pass depth-aided completion.
//!
//! 1. Complete the observation with LRQMC to get `X0`.
//! 2. Estimate a depth map `D` from the color image of `X0`.
//! 3. Build `Xr`: real plane `D`, imaginary planes from the observation.
//! 4. Complete `Xr` with LRQMC under the same mask to get `Xd`; its imaginary
//!    planes (clamped) are the final color image.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::depth::{apply_polarity, estimate_depth, DepthMap, DepthProviderSpec, Polarity};
use crate::error::{Error, Result};
use crate::imaging::{decode_quaternion, RgbImage};
use crate::lrqmc::{run_lrqmc_with, RealPart, SolverParams, SolverTrace};
use crate::mask::MaskMatrix;
use crate::quat::{Plane, QuatMatrix};

pub const STAGE_FIRST_PASS: &str = "first completion pass";
pub const STAGE_DEPTH: &str = "depth estimation";
pub const STAGE_COMPOSE: &str = "depth injection";
pub const STAGE_SECOND_PASS: &str = "second completion pass";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Convert the provider's map to this polarity before injection.
    pub target_polarity: Option<Polarity>,
    /// Constraint on the real plane during the second pass.
    pub real_part: RealPart,
    /// Use the first pass's seed for the second pass instead of `seed + 1`.
    pub reuse_seed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlrqmcResult {
    /// First-pass restoration `X0`.
    pub x0: QuatMatrix,
    pub x0_image: RgbImage,
    /// Depth map after polarity conversion, as injected.
    pub depth: DepthMap,
    /// Second-pass input `Xr`.
    pub xr_input: QuatMatrix,
    /// Second-pass output `Xd`.
    pub xd: QuatMatrix,
    pub final_image: RgbImage,
    pub traces: (SolverTrace, SolverTrace),
    pub depth_time_s: f64,
}

/// Places the depth map in the real plane of `y`, keeping its imaginary planes.
pub fn compose_xr(depth: &DepthMap, y: &QuatMatrix) -> Result<QuatMatrix> {
    if depth.shape() != y.shape() {
        return Err(Error::dims(y.shape(), depth.shape()));
    }
    y.clone().with_plane(Plane::W, depth.values().to_vec())
}

/// Final color image: imaginary planes clamped to `[0, 255]`, real plane dropped.
pub fn decode_final(xd: &QuatMatrix) -> RgbImage {
    decode_quaternion(xd)
}

pub fn second_pass_params(params: &SolverParams, options: &PipelineOptions) -> SolverParams {
    SolverParams {
        seed: if options.reuse_seed {
            params.seed
        } else {
            params.seed.wrapping_add(1)
        },
        ..*params
    }
}

/// Steps 3 and 4 for a depth map already in hand.
pub fn complete_with_depth(
    y: &QuatMatrix,
    mask: &MaskMatrix,
    params: &SolverParams,
    depth: &DepthMap,
    options: &PipelineOptions,
) -> Result<(QuatMatrix, QuatMatrix, SolverTrace)> {
    let xr = compose_xr(depth, y).map_err(|e| e.in_stage(STAGE_COMPOSE))?;
    let (xd, trace) = run_lrqmc_with(&xr, mask, &second_pass_params(params, options), options.real_part)
        .map_err(|e| e.in_stage(STAGE_SECOND_PASS))?;
    Ok((xr, xd, trace))
}

/// Runs the full depth-aided pipeline on observation `y` with support `mask`.
pub fn run_dlrqmc(
    y: &QuatMatrix,
    mask: &MaskMatrix,
    params: &SolverParams,
    depth_spec: &DepthProviderSpec,
    options: &PipelineOptions,
) -> Result<DlrqmcResult> {
    let (x0, trace1) =
        run_lrqmc_with(y, mask, params, RealPart::FollowMask).map_err(|e| e.in_stage(STAGE_FIRST_PASS))?;
    let x0_image = decode_quaternion(&x0);

    let start = Instant::now();
    let raw = estimate_depth(depth_spec, &x0_image).map_err(|e| e.in_stage(STAGE_DEPTH))?;
    let depth_time_s = start.elapsed().as_secs_f64();
    let depth = match options.target_polarity {
        Some(p) => apply_polarity(&raw, p),
        None => raw,
    };

    let (xr_input, xd, trace2) = complete_with_depth(y, mask, params, &depth, options)?;
    let final_image = decode_final(&xd);
    Ok(DlrqmcResult {
        x0,
        x0_image,
        depth,
        xr_input,
        xd,
        final_image,
        traces: (trace1, trace2),
        depth_time_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;

    #[test]
    fn compose_cases() {
        let y = QuatMatrix::from_fn(2, 2, |i, j| Quaternion::new(0.0, 10.0 + i as f64, 20.0 + j as f64, 30.0));
        let zero = DepthMap::zeros(2, 2, Polarity::BlackBackground);
        assert_eq!(compose_xr(&zero, &y).unwrap(), y);

        let single = QuatMatrix::from_fn(1, 1, |_, _| Quaternion::new(0.0, 10.0, 20.0, 30.0));
        let d = DepthMap::new(1, 1, vec![5.0], Polarity::BlackBackground).unwrap();
        assert_eq!(compose_xr(&d, &single).unwrap().get(0, 0), Quaternion::new(5.0, 10.0, 20.0, 30.0));

        let d = DepthMap::new(2, 2, vec![1.5, 2.5, 3.5, 4.5], Polarity::WhiteBackground).unwrap();
        let xr = compose_xr(&d, &y).unwrap();
        assert_eq!(xr.plane(Plane::W), d.values());
        assert!(compose_xr(&DepthMap::zeros(1, 2, Polarity::BlackBackground), &y).is_err());
    }

    #[test]
    fn seed_policy() {
        let p = SolverParams { seed: 7, ..Default::default() };
        assert_eq!(second_pass_params(&p, &PipelineOptions::default()).seed, 8);
        let reuse = PipelineOptions { reuse_seed: true, ..Default::default() };
        assert_eq!(second_pass_params(&p, &reuse).seed, 7);
    }

    #[test]
    fn stage_errors_are_tagged() {
        let y = QuatMatrix::zeros(3, 3);
        let mask = MaskMatrix::all_observed(3, 3);
        let spec = DepthProviderSpec::file("/no/such/depth.png", Polarity::BlackBackground);
        let params = SolverParams { rank: 1, ..Default::default() };
        let err = run_dlrqmc(&y, &mask, &params, &spec, &PipelineOptions::default()).unwrap_err();
        assert!(err.to_string().starts_with(STAGE_DEPTH), "{err}");
    }
}
