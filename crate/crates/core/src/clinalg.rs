//! Dense complex matrices and the Hermitian positive definite solves used by
//! the factor updates.
//!
//! Storage is row-major. Products are parallelised over output rows only, so
//! every entry is accumulated in the same order regardless of thread count and
//! results are bit-identical between serial and parallel execution.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Sub};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Work (in complex multiply-adds) above which `matmul` fans out over rows.
const PAR_THRESHOLD: usize = 1 << 16;

/// Relative tolerance on `‖A − Aᴴ‖_F / ‖A‖_F` accepted by [`hpd_solve`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative pivot floor for the Cholesky factorization, scaled by `trace(A)/n`.
pub const PIVOT_FLOOR: f64 = 1e-14;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        ComplexMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Standard complex matrix product.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("left operand with {} columns", rhs.rows),
                actual: format!("{}x{}", self.rows, self.cols),
            });
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); m * n];
        if n == 0 {
            return Ok(ComplexMatrix::from_vec_unchecked(m, n, out));
        }
        let kernel = |(i, out_row): (usize, &mut [Complex64])| {
            let a_row = &self.data[i * k..(i + 1) * k];
            for (p, &a) in a_row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &rhs.data[p * n..(p + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        };
        if m * k * n >= PAR_THRESHOLD {
            out.par_chunks_mut(n).enumerate().for_each(kernel);
        } else {
            out.chunks_mut(n).enumerate().for_each(kernel);
        }
        Ok(ComplexMatrix::from_vec_unchecked(m, n, out))
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> ComplexMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.data[i * self.cols + j].conj());
            }
        }
        ComplexMatrix::from_vec_unchecked(self.cols, self.rows, data)
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        ComplexMatrix::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z * s).collect(),
        )
    }

    /// Returns `self + shift·I`; the matrix must be square.
    pub fn add_identity(&self, shift: f64) -> Result<ComplexMatrix> {
        if self.rows != self.cols {
            return Err(Error::dims((self.cols, self.cols), self.shape()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)].re += shift;
        }
        Ok(out)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Square root of the sum of squared moduli.
    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Copies the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.data[i * self.cols + c0..i * self.cols + c0 + cols]);
        }
        ComplexMatrix::from_vec_unchecked(rows, cols, data)
    }

    fn zip_with(&self, rhs: &ComplexMatrix, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<ComplexMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(self.shape(), rhs.shape()));
        }
        Ok(ComplexMatrix::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(&a, &b)| op(a, b)).collect(),
        ))
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch; use [`ComplexMatrix::try_add`] otherwise.
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("shape mismatch in matrix addition")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("shape mismatch in matrix subtraction")
    }
}

/// Free-function form of [`ComplexMatrix::matmul`].
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    a.hermitian()
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.frobenius()
}

/// Lower-triangular Cholesky factor `L` with `A = L·Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    /// Factorizes a Hermitian positive definite matrix. Only the lower
    /// triangle of `a` is read.
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::dims((n, n), a.shape()));
        }
        let threshold = if n == 0 {
            0.0
        } else {
            PIVOT_FLOOR * a.trace().re.abs() / n as f64
        };
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let lj = &l.data[j * n..j * n + j];
            let d = a[(j, j)].re - lj.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if !(d > threshold) {
                return Err(Error::NotPositiveDefinite {
                    index: j,
                    pivot: d,
                    threshold,
                });
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for p in 0..j {
                    s -= l.data[i * n + p] * l.data[j * n + p].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor_matrix(&self) -> &ComplexMatrix {
        &self.l
    }

    /// Solves `A·X = B` by forward then backward substitution on whole rows.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} rows"),
                actual: format!("{}x{}", b.rows(), b.cols()),
            });
        }
        let m = b.cols();
        let l = &self.l;
        // L·Y = B
        let mut y = b.data.clone();
        for i in 0..n {
            let (done, rest) = y.split_at_mut(i * m);
            let row = &mut rest[..m];
            for p in 0..i {
                let lip = l.data[i * n + p];
                if lip.re == 0.0 && lip.im == 0.0 {
                    continue;
                }
                for (r, &yp) in row.iter_mut().zip(&done[p * m..(p + 1) * m]) {
                    *r -= lip * yp;
                }
            }
            let inv = 1.0 / l.data[i * n + i].re;
            row.iter_mut().for_each(|r| *r *= inv);
        }
        // Lᴴ·X = Y
        for i in (0..n).rev() {
            let (head, tail) = y.split_at_mut((i + 1) * m);
            let row = &mut head[i * m..];
            for p in i + 1..n {
                let c = l.data[p * n + i].conj();
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let xp = &tail[(p - i - 1) * m..(p - i) * m];
                for (r, &x) in row.iter_mut().zip(xp) {
                    *r -= c * x;
                }
            }
            let inv = 1.0 / l.data[i * n + i].re;
            row.iter_mut().for_each(|r| *r *= inv);
        }
        Ok(ComplexMatrix::from_vec_unchecked(n, m, y))
    }
}

/// Relative Hermitian defect `‖A − Aᴴ‖_F / ‖A‖_F` (zero for the zero matrix).
pub fn hermitian_defect(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut num = 0.0;
    for i in 0..n {
        for j in 0..a.cols().min(n) {
            num += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    let den = a.frobenius_sq();
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Solves `A·X = B` for Hermitian positive definite `A` via Cholesky.
pub fn hpd_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != a.cols() {
        return Err(Error::dims((a.rows(), a.rows()), a.shape()));
    }
    let defect = hermitian_defect(a);
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidParameter(format!(
            "matrix is not Hermitian (relative defect {defect:.3e})"
        )));
    }
    Cholesky::factor(a)?.solve(b)
}

/// Matrix with real and imaginary parts drawn i.i.d. uniform on `[lo, hi]`.
pub fn random_complex<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Result<ComplexMatrix> {
    if !(lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "random_complex requires lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let draw = |rng: &mut R| {
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..=hi)
        }
    };
    let data = (0..rows * cols)
        .map(|_| {
            let re = draw(rng);
            let im = draw(rng);
            Complex64::new(re, im)
        })
        .collect();
    Ok(ComplexMatrix::from_vec_unchecked(rows, cols, data))
}
