#![allow(dead_code)]

use quatpaint_core::clinalg::ComplexMatrix;
use quatpaint_core::{seeded_rng, QuatMatrix, Quaternion, SeededRng};
use rand::Rng;

pub fn rand_quat(rng: &mut impl Rng, scale: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn rand_qmat(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> QuatMatrix {
    QuatMatrix::from_fn(rows, cols, |_, _| rand_quat(rng, scale))
}

pub fn rng(seed: u64) -> SeededRng {
    seeded_rng(seed)
}

/// Product by explicit Hamilton sums, independent of the embedding.
pub fn hamilton_matmul(p: &QuatMatrix, q: &QuatMatrix) -> QuatMatrix {
    assert_eq!(p.cols(), q.rows());
    QuatMatrix::from_fn(p.rows(), q.cols(), |i, j| {
        (0..p.cols()).fold(Quaternion::default(), |acc, k| acc + p.get(i, k) * q.get(k, j))
    })
}

pub fn rel_err(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.try_sub(b).unwrap().frobenius();
    let s = b.frobenius();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
