//! Generated data with known ground truth: exactly low-rank quaternion
//! matrices and layered color scenes with matching depth maps.

use rand::Rng;

use crate::depth::{DepthMap, Polarity};
use crate::imaging::RgbImage;
use crate::quat::{QuatMatrix, Quaternion};

/// Rank-`rank` quaternion matrix `P·Q` with `P` real and nonnegative and
/// `Q` having nonnegative components, rescaled so the largest component is
/// 255. With `pure_imaginary` the real plane of `Q` (and so of the product)
/// is zero, which makes the result a valid color image.
pub fn low_rank_quaternion<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rank: usize,
    pure_imaginary: bool,
) -> QuatMatrix {
    let p: Vec<f64> = (0..rows * rank).map(|_| rng.random_range(0.0..1.0)).collect();
    let q: Vec<Quaternion> = (0..rank * cols)
        .map(|_| {
            let w = if pure_imaginary { 0.0 } else { rng.random_range(0.0..1.0) };
            Quaternion::new(w, rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
        })
        .collect();
    let mut out = QuatMatrix::from_fn(rows, cols, |i, j| {
        (0..rank).fold(Quaternion::default(), |acc, k| {
            let s = p[i * rank + k];
            let e = q[k * cols + j];
            acc + Quaternion::new(s * e.w, s * e.x, s * e.y, s * e.z)
        })
    });
    let peak = [crate::quat::Plane::W, crate::quat::Plane::X, crate::quat::Plane::Y, crate::quat::Plane::Z]
        .iter()
        .flat_map(|&pl| out.plane(pl).to_vec())
        .fold(0.0f64, f64::max);
    if peak > 0.0 {
        let s = 255.0 / peak;
        for pl in [crate::quat::Plane::W, crate::quat::Plane::X, crate::quat::Plane::Y, crate::quat::Plane::Z] {
            out.plane_mut(pl).iter_mut().for_each(|v| *v = (*v * s).min(255.0));
        }
    }
    out
}

/// A synthetic scene and its ground-truth depth.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredScene {
    pub image: RgbImage,
    /// Black-background depth: far is dark, near is bright.
    pub depth: DepthMap,
}

/// Piecewise-constant scene: axis-aligned colored rectangles stacked at
/// distinct depths over a background, painted far to near. The layout follows
/// depth the way a ground plane does: nearer layers are larger and sit lower
/// in the frame.
pub fn layered_scene<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, layers: usize) -> LayeredScene {
    let mut color = vec![random_color(rng); rows * cols];
    let mut depth = vec![rng.random_range(10.0..40.0); rows * cols];

    let step = (255.0 - 60.0) / layers.max(1) as f64;
    for layer in 0..layers {
        // 0 for the farthest layer, 1 for the nearest.
        let t = (layer + 1) as f64 / layers as f64;
        let span = |n: usize, rng: &mut R| {
            let lo = n as f64 * (0.15 + 0.2 * t);
            let hi = n as f64 * (0.3 + 0.3 * t);
            (rng.random_range(lo..=hi).round() as usize).clamp(1, n)
        };
        let h = span(rows, rng);
        let w = span(cols, rng);
        let lowest_top = rows - h;
        let top = rng.random_range((lowest_top as f64 * 0.6 * t) as usize..=lowest_top);
        let left = rng.random_range(0..=cols - w);
        let c = random_color(rng);
        let d = 60.0 + step * (layer as f64 + rng.random_range(0.2..0.8));
        for i in top..top + h {
            for j in left..left + w {
                color[i * cols + j] = c;
                depth[i * cols + j] = d;
            }
        }
    }

    let image = RgbImage::from_fn(rows, cols, |i, j| color[i * cols + j]).expect("layer colors stay in range");
    let depth = DepthMap::new(rows, cols, depth, Polarity::BlackBackground).expect("layer depths stay in range");
    LayeredScene { image, depth }
}

fn random_color<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    [rng.random_range(20.0..235.0), rng.random_range(20.0..235.0), rng.random_range(20.0..235.0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Plane;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn low_rank_is_scaled_and_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = low_rank_quaternion(&mut rng, 10, 12, 3, false);
        let all: Vec<f64> = [Plane::W, Plane::X, Plane::Y, Plane::Z]
            .iter()
            .flat_map(|&p| l.plane(p).to_vec())
            .collect();
        assert!(all.iter().all(|v| (0.0..=255.0).contains(v)));
        assert!(all.iter().any(|&v| v == 255.0));

        let img = low_rank_quaternion(&mut rng, 10, 12, 3, true);
        assert!(img.plane(Plane::W).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scenes_are_deterministic_and_valid() {
        let a = layered_scene(&mut ChaCha8Rng::seed_from_u64(5), 32, 40, 4);
        let b = layered_scene(&mut ChaCha8Rng::seed_from_u64(5), 32, 40, 4);
        assert_eq!(a, b);
        assert_eq!(a.image.shape(), (32, 40));
        assert_eq!(a.depth.shape(), (32, 40));
    }

    #[test]
    fn nearer_layers_are_brighter_in_depth_and_lower_in_frame() {
        let mut lower = 0;
        for seed in 0..50 {
            let s = layered_scene(&mut ChaCha8Rng::seed_from_u64(seed), 60, 60, 4);
            let d = s.depth.values();
            // Depth-weighted mean row exceeds the plain mean row when near
            // (bright) pixels sit low in the frame.
            let (mut wsum, mut w) = (0.0, 0.0);
            for (k, v) in d.iter().enumerate() {
                wsum += v * (k / 60) as f64;
                w += v;
            }
            if wsum / w > 29.5 {
                lower += 1;
            }
            assert!(d.iter().all(|v| (10.0..=255.0).contains(v)));
        }
        assert!(lower >= 40, "{lower}/50");
    }
}
