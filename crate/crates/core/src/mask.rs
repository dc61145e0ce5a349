//! Binary observation masks: `1` marks an observed pixel, `0` a missing one.

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaskMatrix {
    rows: usize,
    cols: usize,
    observed: Vec<bool>,
}

impl MaskMatrix {
    pub fn all_observed(rows: usize, cols: usize) -> Self {
        MaskMatrix {
            rows,
            cols,
            observed: vec![true; rows * cols],
        }
    }

    pub fn all_missing(rows: usize, cols: usize) -> Self {
        MaskMatrix {
            rows,
            cols,
            observed: vec![false; rows * cols],
        }
    }

    pub fn from_bools(rows: usize, cols: usize, observed: Vec<bool>) -> Result<Self> {
        if observed.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} mask entries", rows * cols),
                actual: format!("{}", observed.len()),
            });
        }
        Ok(MaskMatrix { rows, cols, observed })
    }

    /// Builds a mask from 0/1 entries; any other value is rejected.
    pub fn from_bits(rows: usize, cols: usize, bits: &[u8]) -> Result<Self> {
        let observed = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "mask entries must be 0 or 1, found {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bools(rows, cols, observed)
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
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[i * self.cols + j]
    }

    /// Row-major observed flags.
    pub fn as_slice(&self) -> &[bool] {
        &self.observed
    }

    pub fn missing_count(&self) -> usize {
        self.observed.iter().filter(|&&b| !b).count()
    }

    pub fn observed_count(&self) -> usize {
        self.observed.len() - self.missing_count()
    }

    /// The complementary mask (observed ↔ missing).
    pub fn complement(&self) -> MaskMatrix {
        MaskMatrix {
            rows: self.rows,
            cols: self.cols,
            observed: self.observed.iter().map(|b| !b).collect(),
        }
    }

    pub(crate) fn check_shape(&self, shape: (usize, usize)) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::dims(shape, self.shape()));
        }
        Ok(())
    }
}

/// Random mask with exactly `round(missing_fraction·M·N)` missing pixels,
/// chosen uniformly without replacement.
pub fn gen_mask<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    missing_fraction: f64,
) -> Result<MaskMatrix> {
    if !(0.0..=1.0).contains(&missing_fraction) {
        return Err(Error::InvalidParameter(format!(
            "missing fraction must lie in [0, 1], got {missing_fraction}"
        )));
    }
    let total = rows * cols;
    let missing = (missing_fraction * total as f64).round() as usize;
    let mut observed = vec![true; total];
    for idx in rand::seq::index::sample(rng, total, missing.min(total)) {
        observed[idx] = false;
    }
    Ok(MaskMatrix { rows, cols, observed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn extreme_fractions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(gen_mask(&mut rng, 5, 7, 0.0).unwrap(), MaskMatrix::all_observed(5, 7));
        assert_eq!(gen_mask(&mut rng, 5, 7, 1.0).unwrap(), MaskMatrix::all_missing(5, 7));
        assert!(gen_mask(&mut rng, 5, 7, 1.5).is_err());
    }

    #[test]
    fn dataset_sized_mask_count_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = gen_mask(&mut rng, 481, 321, 0.3).unwrap();
        assert_eq!(m.missing_count(), 46_320);
    }

    #[test]
    fn same_seed_same_mask() {
        let a = gen_mask(&mut ChaCha8Rng::seed_from_u64(9), 30, 20, 0.5).unwrap();
        let b = gen_mask(&mut ChaCha8Rng::seed_from_u64(9), 30, 20, 0.5).unwrap();
        let c = gen_mask(&mut ChaCha8Rng::seed_from_u64(10), 30, 20, 0.5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bits_must_be_binary() {
        assert!(MaskMatrix::from_bits(1, 2, &[0, 2]).is_err());
        let m = MaskMatrix::from_bits(1, 2, &[0, 1]).unwrap();
        assert!(!m.is_observed(0, 0) && m.is_observed(0, 1));
        assert_eq!(m.complement().as_slice(), &[true, false]);
    }
}
