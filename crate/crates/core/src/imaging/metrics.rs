//! PSNR and SSIM against a reference image, and the score differences used to
//! compare the one-pass and depth-aided restorations.
//!
//! SSIM uses an 11×11 Gaussian window (σ = 1.5), K1 = 0.01, K2 = 0.03,
//! L = 255, evaluated over "valid" window positions of each channel; the
//! three channel means are averaged.

use serde::{Deserialize, Serialize};

use super::RgbImage;
use crate::error::{Error, Result};

pub const PEAK: f64 = 255.0;
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Human-readable SSIM convention, recorded in reports.
pub const SSIM_CONVENTION: &str =
    "gaussian 11x11 sigma=1.5, K1=0.01, K2=0.03, L=255, valid windows, mean over R/G/B";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    /// dB; `+inf` when the images are identical.
    pub psnr: f64,
    pub ssim: f64,
}

impl ScorePair {
    pub fn compute(reference: &RgbImage, test: &RgbImage) -> Result<Self> {
        Ok(ScorePair {
            psnr: psnr(reference, test)?,
            ssim: ssim(reference, test)?,
        })
    }
}

/// `10·log10(255² / MSE)` with the MSE pooled over all three channels.
/// Returns `f64::INFINITY` when the images are identical.
pub fn psnr(reference: &RgbImage, test: &RgbImage) -> Result<f64> {
    reference.check_same_shape(test)?;
    let n = 3 * reference.rows() * reference.cols();
    if n == 0 {
        return Err(Error::InvalidImage("cannot score an empty image".into()));
    }
    let sse: f64 = reference
        .channels()
        .iter()
        .zip(test.channels())
        .flat_map(|(a, b)| a.iter().zip(b.iter()))
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse / n as f64;
    Ok(10.0 * (PEAK * PEAK / mse).log10())
}

/// Normalized 1-D Gaussian taps.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let taps: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - c;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / s).collect()
}

/// Separable "valid" filtering of a row-major plane.
fn filter_valid(plane: &[f64], rows: usize, cols: usize, k: &[f64]) -> Vec<f64> {
    let w = k.len();
    let out_c = cols + 1 - w;
    let out_r = rows + 1 - w;
    let mut horiz = vec![0.0; rows * out_c];
    for i in 0..rows {
        let src = &plane[i * cols..(i + 1) * cols];
        for j in 0..out_c {
            horiz[i * out_c + j] = k.iter().zip(&src[j..j + w]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; out_r * out_c];
    for i in 0..out_r {
        for (t, &kt) in k.iter().enumerate() {
            let src = &horiz[(i + t) * out_c..(i + t + 1) * out_c];
            for (o, &s) in out[i * out_c..(i + 1) * out_c].iter_mut().zip(src) {
                *o += kt * s;
            }
        }
    }
    out
}

fn ssim_channel(x: &[f64], y: &[f64], rows: usize, cols: usize, k: &[f64]) -> f64 {
    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let mu_x = filter_valid(x, rows, cols, k);
    let mu_y = filter_valid(y, rows, cols, k);
    let e_xx = filter_valid(&xx, rows, cols, k);
    let e_yy = filter_valid(&yy, rows, cols, k);
    let e_xy = filter_valid(&xy, rows, cols, k);
    let n = mu_x.len();
    let mut total = 0.0;
    for p in 0..n {
        let (mx, my) = (mu_x[p], mu_y[p]);
        let (mxx, myy, mxy) = (mx * mx, my * my, mx * my);
        let sxx = e_xx[p] - mxx;
        let syy = e_yy[p] - myy;
        let sxy = e_xy[p] - mxy;
        total += ((2.0 * mxy + c1) * (2.0 * sxy + c2)) / ((mxx + myy + c1) * (sxx + syy + c2));
    }
    total / n as f64
}

/// Mean SSIM, averaged over the three channels.
pub fn ssim(reference: &RgbImage, test: &RgbImage) -> Result<f64> {
    reference.check_same_shape(test)?;
    let (rows, cols) = reference.shape();
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(Error::TooSmall {
            rows,
            cols,
            min: SSIM_WINDOW,
        });
    }
    let k = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA);
    let sum: f64 = reference
        .channels()
        .iter()
        .zip(test.channels())
        .map(|(x, y)| ssim_channel(x, y, rows, cols, &k))
        .sum();
    Ok(sum / 3.0)
}

/// `(Δ_PSNR, Δ_SSIM)` = depth-aided minus baseline; positive means the
/// depth-aided result is better.
pub fn delta_scores(baseline: ScorePair, depth_aided: ScorePair) -> (f64, f64) {
    (depth_aided.psnr - baseline.psnr, depth_aided.ssim - baseline.ssim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut impl Rng, rows: usize, cols: usize) -> RgbImage {
        RgbImage::from_fn(rows, cols, |_, _| {
            [
                rng.random_range(0.0..=255.0),
                rng.random_range(0.0..=255.0),
                rng.random_range(0.0..=255.0),
            ]
        })
        .unwrap()
    }

    /// Direct per-window evaluation with 2-D weights.
    pub(crate) fn naive_ssim(a: &RgbImage, b: &RgbImage) -> f64 {
        let g = gaussian_kernel(11, 1.5);
        let (rows, cols) = a.shape();
        let c1 = (0.01f64 * 255.0).powi(2);
        let c2 = (0.03f64 * 255.0).powi(2);
        let mut acc = 0.0;
        for c in 0..3 {
            let mut total = 0.0;
            let mut count = 0;
            for i in 0..=rows - 11 {
                for j in 0..=cols - 11 {
                    let (mut mx, mut my) = (0.0, 0.0);
                    for u in 0..11 {
                        for v in 0..11 {
                            let w = g[u] * g[v];
                            mx += w * a.pixel(i + u, j + v)[c];
                            my += w * b.pixel(i + u, j + v)[c];
                        }
                    }
                    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
                    for u in 0..11 {
                        for v in 0..11 {
                            let w = g[u] * g[v];
                            let dx = a.pixel(i + u, j + v)[c] - mx;
                            let dy = b.pixel(i + u, j + v)[c] - my;
                            vx += w * dx * dx;
                            vy += w * dy * dy;
                            cxy += w * dx * dy;
                        }
                    }
                    total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                        / ((mx * mx + my * my + c1) * (vx + vy + c2));
                    count += 1;
                }
            }
            acc += total / count as f64;
        }
        acc / 3.0
    }

    #[test]
    fn psnr_closed_forms() {
        let black = RgbImage::constant(4, 5, [0.0; 3]).unwrap();
        let white = RgbImage::constant(4, 5, [255.0; 3]).unwrap();
        assert_eq!(psnr(&black, &black).unwrap(), f64::INFINITY);
        assert!(psnr(&black, &white).unwrap().abs() < 1e-12);
        let sixteen = RgbImage::constant(4, 5, [16.0; 3]).unwrap();
        let p = psnr(&black, &sixteen).unwrap();
        assert!((p - 24.0484).abs() < 1e-3, "{p}");
        assert!((p - 20.0 * (255.0f64 / 16.0).log10()).abs() < 1e-12);
    }

    #[test]
    fn psnr_decreases_with_error() {
        let base = RgbImage::constant(3, 3, [100.0; 3]).unwrap();
        let mut last = f64::INFINITY;
        for e in [1.0, 2.0, 5.0, 20.0, 100.0] {
            let p = psnr(&base, &RgbImage::constant(3, 3, [100.0 + e; 3]).unwrap()).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn ssim_identity_is_exactly_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = random_image(&mut rng, 16, 20);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
    }

    #[test]
    fn ssim_constant_images_reduce_to_luminance_term() {
        let a = RgbImage::constant(12, 12, [128.0; 3]).unwrap();
        let b = RgbImage::constant(12, 12, [127.0; 3]).unwrap();
        let c1 = (0.01f64 * 255.0).powi(2);
        let expected = (2.0 * 128.0 * 127.0 + c1) / (128.0f64.powi(2) + 127.0f64.powi(2) + c1);
        assert!((ssim(&a, &b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn ssim_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let a = random_image(&mut rng, 14, 17);
            let b = random_image(&mut rng, 14, 17);
            assert!((ssim(&a, &b).unwrap() - naive_ssim(&a, &b)).abs() < 1e-6);
        }
    }

    #[test]
    fn ssim_rejects_small_and_mismatched() {
        let a = RgbImage::constant(10, 20, [0.0; 3]).unwrap();
        assert!(matches!(ssim(&a, &a), Err(Error::TooSmall { .. })));
        let b = RgbImage::constant(11, 11, [0.0; 3]).unwrap();
        let c = RgbImage::constant(11, 12, [0.0; 3]).unwrap();
        assert!(matches!(ssim(&b, &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn deltas() {
        let a = ScorePair { psnr: 30.0, ssim: 0.9 };
        assert_eq!(delta_scores(a, a), (0.0, 0.0));
        let (dp, ds) = delta_scores(a, ScorePair { psnr: 31.0, ssim: 0.92 });
        assert!((dp - 1.0).abs() < 1e-12 && (ds - 0.02).abs() < 1e-12);
    }
}
