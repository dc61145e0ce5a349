//! Color image inpainting by low-rank quaternion matrix completion, with a
//! depth-aided two-pass variant that places a depth map in the quaternion
//! real part before completing a second time.
//!
//! Module map:
//! - [`quat`]: quaternions, quaternion matrices, the complex adjoint embedding.
//! - [`clinalg`]: dense complex matrices and Hermitian positive definite solves.
//! - [`lrqmc`]: the alternating-minimization completion engine.
//! - [`depth`]: depth-map providers (file, external command, builtin proxy).
//! - [`pipeline`]: the two-pass depth-aided flow.
//! - [`imaging`]: images, masks, quaternion encoding, I/O and metrics.
//! - [`synthetic`]: generated test scenes with known ground truth.

pub mod clinalg;
pub mod depth;
pub mod error;
pub mod imaging;
pub mod lrqmc;
pub mod mask;
pub mod pipeline;
pub mod quat;
pub mod synthetic;

pub use clinalg::{hpd_solve, ComplexMatrix};
pub use depth::{DepthKind, DepthMap, DepthProviderSpec, Polarity};
pub use error::{Error, Result};
pub use imaging::{decode_quaternion, encode_quaternion, RgbImage, ScorePair};
pub use lrqmc::{run_lrqmc, FactorPair, RealPart, SolverParams, SolverTrace};
pub use mask::{gen_mask, MaskMatrix};
pub use pipeline::{run_dlrqmc, DlrqmcResult, PipelineOptions};
pub use quat::{embed_f, inv_f, QuatMatrix, Quaternion};

/// Seeded generator used for masks, initializations and synthetic data.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Creates the crate's standard seeded generator.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
