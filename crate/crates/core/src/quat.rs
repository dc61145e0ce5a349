//! Quaternion scalars, quaternion matrices and the complex adjoint embedding.
//!
//! A quaternion matrix `Q = Q0 + Q1 i + Q2 j + Q3 k` is split as
//! `Q = Qa + Qb j` with `Qa = Q0 + Q1 i` and `Qb = Q2 + Q3 i`, and embedded
//! into a complex matrix of twice the size:
//!
//! ```text
//! f(Q) = [  Qa        Qb      ]
//!        [ -conj(Qb)  conj(Qa) ]
//! ```
//!
//! `f` is an injective *-homomorphism: it preserves sums, products and the
//! conjugate transpose, and scales the Frobenius norm by √2.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::clinalg::ComplexMatrix;
use crate::error::{Error, Result};

/// Default relative tolerance accepted by [`inv_f`].
pub const INV_F_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// `(a, b)` with `q = a + b·j`, `a = w + x i`, `b = y + z i`.
    pub fn to_complex_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product.
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.w + q.w, self.x + q.x, self.y + q.y, self.z + q.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.w - q.w, self.x - q.x, self.y - q.y, self.z - q.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

/// Identifies one of the four real component planes of a [`QuatMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    W,
    X,
    Y,
    Z,
}

/// M×N quaternion matrix stored as four row-major real planes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatMatrix {
    rows: usize,
    cols: usize,
    w: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl QuatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        QuatMatrix {
            rows,
            cols,
            w: vec![0.0; n],
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    /// Builds a matrix from four row-major planes of equal length `rows·cols`.
    pub fn from_planes(
        rows: usize,
        cols: usize,
        w: Vec<f64>,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
    ) -> Result<Self> {
        let n = rows * cols;
        for (name, p) in [("w", &w), ("x", &x), ("y", &y), ("z", &z)] {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n} entries in plane {name}"),
                    actual: format!("{}", p.len()),
                });
            }
        }
        Ok(QuatMatrix { rows, cols, w, x, y, z })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Real identity of size n.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::ONE } else { Quaternion::default() })
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        let k = i * self.cols + j;
        Quaternion::new(self.w[k], self.x[k], self.y[k], self.z[k])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        let k = i * self.cols + j;
        self.w[k] = q.w;
        self.x[k] = q.x;
        self.y[k] = q.y;
        self.z[k] = q.z;
    }

    pub fn plane(&self, p: Plane) -> &[f64] {
        match p {
            Plane::W => &self.w,
            Plane::X => &self.x,
            Plane::Y => &self.y,
            Plane::Z => &self.z,
        }
    }

    pub fn plane_mut(&mut self, p: Plane) -> &mut [f64] {
        match p {
            Plane::W => &mut self.w,
            Plane::X => &mut self.x,
            Plane::Y => &mut self.y,
            Plane::Z => &mut self.z,
        }
    }

    /// Replaces one plane; the new plane must have `rows·cols` entries.
    pub fn with_plane(mut self, p: Plane, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", self.rows * self.cols),
                actual: format!("{}", values.len()),
            });
        }
        *match p {
            Plane::W => &mut self.w,
            Plane::X => &mut self.x,
            Plane::Y => &mut self.y,
            Plane::Z => &mut self.z,
        } = values;
        Ok(self)
    }

    pub fn is_finite(&self) -> bool {
        [&self.w, &self.x, &self.y, &self.z]
            .iter()
            .all(|p| p.iter().all(|v| v.is_finite()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        [&self.w, &self.x, &self.y, &self.z]
            .iter()
            .flat_map(|p| p.iter())
            .map(|v| v * v)
            .sum()
    }

    /// Square root of the sum of squares over all four planes.
    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Quaternion conjugate transpose.
    pub fn conj_transpose(&self) -> QuatMatrix {
        QuatMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    fn zip_with(&self, rhs: &QuatMatrix, op: impl Fn(f64, f64) -> f64) -> Result<QuatMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(self.shape(), rhs.shape()));
        }
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&u, &v)| op(u, v)).collect();
        Ok(QuatMatrix {
            rows: self.rows,
            cols: self.cols,
            w: zip(&self.w, &rhs.w),
            x: zip(&self.x, &rhs.x),
            y: zip(&self.y, &rhs.y),
            z: zip(&self.z, &rhs.z),
        })
    }

    pub fn try_add(&self, rhs: &QuatMatrix) -> Result<QuatMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &QuatMatrix) -> Result<QuatMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// Quaternion matrix product, computed through the complex embedding.
    pub fn matmul(&self, rhs: &QuatMatrix) -> Result<QuatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("left operand with {} columns", rhs.rows),
                actual: format!("{}x{}", self.rows, self.cols),
            });
        }
        let prod = embed_f(self).matmul(&embed_f(rhs))?;
        inv_f(&prod, INV_F_TOL)
    }
}

/// Complex adjoint embedding of an M×N quaternion matrix into C^{2M×2N}.
pub fn embed_f(q: &QuatMatrix) -> ComplexMatrix {
    let (m, n) = q.shape();
    let mut c = ComplexMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let k = i * n + j;
            let a = Complex64::new(q.w[k], q.x[k]);
            let b = Complex64::new(q.y[k], q.z[k]);
            c[(i, j)] = a;
            c[(i, j + n)] = b;
            c[(i + m, j)] = -b.conj();
            c[(i + m, j + n)] = a.conj();
        }
    }
    c
}

fn half_dims(c: &ComplexMatrix) -> Result<(usize, usize)> {
    let (r, k) = c.shape();
    if r % 2 != 0 || k % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: "even row and column counts".into(),
            actual: format!("{r}x{k}"),
        });
    }
    Ok((r / 2, k / 2))
}

/// Relative Frobenius deviation of `c` from the adjoint block structure:
/// `sqrt(‖TL − conj(BR)‖² + ‖TR + conj(BL)‖²) / ‖c‖`.
pub fn structure_deviation(c: &ComplexMatrix) -> Result<f64> {
    let (m, n) = half_dims(c)?;
    let mut num = 0.0;
    for i in 0..m {
        for j in 0..n {
            num += (c[(i, j)] - c[(i + m, j + n)].conj()).norm_sqr();
            num += (c[(i, j + n)] + c[(i + m, j)].conj()).norm_sqr();
        }
    }
    let den = c.frobenius_sq();
    Ok(if num == 0.0 { 0.0 } else { (num / den).sqrt() })
}

/// Inverse of [`embed_f`], reconstructing from block averages.
///
/// Fails with [`Error::StructureViolation`] when `c` deviates from the
/// adjoint structure by more than `tol` (relative Frobenius).
pub fn inv_f(c: &ComplexMatrix, tol: f64) -> Result<QuatMatrix> {
    let (m, n) = half_dims(c)?;
    let deviation = structure_deviation(c)?;
    if !(deviation <= tol) {
        return Err(Error::StructureViolation { deviation, tol });
    }
    let mut q = QuatMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let a = (c[(i, j)] + c[(i + m, j + n)].conj()) / 2.0;
            let b = (c[(i, j + n)] - c[(i + m, j)].conj()) / 2.0;
            let k = i * n + j;
            q.w[k] = a.re;
            q.x[k] = a.im;
            q.y[k] = b.re;
            q.z[k] = b.im;
        }
    }
    Ok(q)
}

/// Projects a near-structured complex matrix onto the adjoint structure
/// (`embed_f ∘ inv_f`).
pub fn resymmetrize(c: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    Ok(embed_f(&inv_f(c, tol)?))
}

pub fn quat_frobenius(q: &QuatMatrix) -> f64 {
    q.frobenius()
}
