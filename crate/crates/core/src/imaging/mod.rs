//! Color images, their quaternion encoding, masking, file I/O and quality
//! metrics.

pub mod io;
pub mod metrics;

use crate::error::{Error, Result};
use crate::mask::MaskMatrix;
use crate::quat::{Plane, QuatMatrix};

pub use metrics::{delta_scores, psnr, ssim, ScorePair};

/// Real-valued RGB image with channel values in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    rows: usize,
    cols: usize,
    r: Vec<f64>,
    g: Vec<f64>,
    b: Vec<f64>,
}

fn check_range(name: &str, plane: &[f64]) -> Result<()> {
    match plane.iter().find(|v| !(0.0..=255.0).contains(*v)) {
        Some(v) => Err(Error::InvalidImage(format!(
            "{name} channel value {v} outside [0, 255]"
        ))),
        None => Ok(()),
    }
}

impl RgbImage {
    pub fn new(rows: usize, cols: usize, r: Vec<f64>, g: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = rows * cols;
        for (name, p) in [("red", &r), ("green", &g), ("blue", &b)] {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n} entries in {name} channel"),
                    actual: format!("{}", p.len()),
                });
            }
            check_range(name, p)?;
        }
        Ok(RgbImage { rows, cols, r, g, b })
    }

    /// Builds an image from arbitrary real planes, clamping into `[0, 255]`.
    /// NaN maps to 0.
    pub fn from_planes_clamped(rows: usize, cols: usize, r: &[f64], g: &[f64], b: &[f64]) -> Result<Self> {
        let clamp = |p: &[f64]| -> Vec<f64> {
            p.iter()
                .map(|&v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 255.0) })
                .collect()
        };
        Self::new(rows, cols, clamp(r), clamp(g), clamp(b))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Result<Self> {
        let n = rows * cols;
        let (mut r, mut g, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..rows {
            for j in 0..cols {
                let [pr, pg, pb] = f(i, j);
                r.push(pr);
                g.push(pg);
                b.push(pb);
            }
        }
        Self::new(rows, cols, r, g, b)
    }

    pub fn constant(rows: usize, cols: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| rgb)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    pub fn pixel(&self, i: usize, j: usize) -> [f64; 3] {
        let k = i * self.cols + j;
        [self.r[k], self.g[k], self.b[k]]
    }

    /// The three channel planes in R, G, B order.
    pub fn channels(&self) -> [&[f64]; 3] {
        [&self.r, &self.g, &self.b]
    }

    /// Rec. 601 luma per pixel.
    pub fn luminance(&self) -> Vec<f64> {
        self.r
            .iter()
            .zip(&self.g)
            .zip(&self.b)
            .map(|((r, g), b)| 0.299 * r + 0.587 * g + 0.114 * b)
            .collect()
    }

    pub fn check_same_shape(&self, other: &RgbImage) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dims(self.shape(), other.shape()));
        }
        Ok(())
    }
}

/// Pure quaternion encoding: real plane zero, i/j/k planes hold R/G/B.
pub fn encode_quaternion(img: &RgbImage) -> QuatMatrix {
    let (m, n) = img.shape();
    QuatMatrix::from_planes(m, n, vec![0.0; m * n], img.r.clone(), img.g.clone(), img.b.clone())
        .expect("planes share image dimensions")
}

/// Reads R/G/B from the imaginary planes, clamped to `[0, 255]`; the real
/// plane is discarded.
pub fn decode_quaternion(q: &QuatMatrix) -> RgbImage {
    RgbImage::from_planes_clamped(
        q.rows(),
        q.cols(),
        q.plane(Plane::X),
        q.plane(Plane::Y),
        q.plane(Plane::Z),
    )
    .expect("planes share matrix dimensions")
}

/// Zeroes every channel of the pixels the mask marks as missing.
pub fn apply_mask(img: &RgbImage, mask: &MaskMatrix) -> Result<RgbImage> {
    mask.check_shape(img.shape())?;
    let keep = |p: &[f64]| -> Vec<f64> {
        p.iter()
            .zip(mask.as_slice())
            .map(|(&v, &obs)| if obs { v } else { 0.0 })
            .collect()
    };
    Ok(RgbImage {
        rows: img.rows,
        cols: img.cols,
        r: keep(&img.r),
        g: keep(&img.g),
        b: keep(&img.b),
    })
}
