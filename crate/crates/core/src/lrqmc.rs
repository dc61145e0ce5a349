//! Low-rank quaternion matrix completion by alternating minimization.
//!
//! The image `X` (M×N quaternions) is approximated through complex factors
//! `fU` (2M×2K) and `fV` (2K×2N) living in the adjoint representation. Each
//! iteration solves three convex subproblems of
//!
//! ```text
//! G(fU, fV, X) = ½‖fU·fV − f(X)‖²_F + (λ/2)(‖fU‖²_F + ‖fV‖²_F)
//! ```
//!
//! exactly and in turn: a ridge solve for `fU`, a ridge solve for `fV`, and a
//! masked copy for `X` that keeps observed pixels fixed to the observation.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clinalg::{hpd_solve, ComplexMatrix};
use crate::error::{Error, Result};
use crate::quat::{embed_f, inv_f, structure_deviation, Plane, QuatMatrix, Quaternion, INV_F_TOL};

pub use crate::mask::MaskMatrix;

/// Support of the initial `V` entries (each quaternion component).
pub const INIT_RANGE: (f64, f64) = (0.0, 255.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Factorization rank K (quaternion columns of U).
    pub rank: usize,
    /// Ridge weight λ.
    pub lambda: f64,
    pub max_iters: usize,
    /// Stop once `‖X⁺ − X‖_F / ‖X‖_F` drops to or below this value.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            rank: 80,
            lambda: 1.0,
            max_iters: 200,
            rel_tol: 1e-4,
            seed: 0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidParameter("rank K must be at least 1".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be nonnegative, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// How the real plane is constrained during the `X` update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealPart {
    /// The real plane follows the pixel mask like the color planes.
    #[default]
    FollowMask,
    /// The real plane is held at the observation's values at every pixel.
    AlwaysObserved,
}

/// Factors in the adjoint representation.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub fu: ComplexMatrix,
    pub fv: ComplexMatrix,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    /// `G` after each completed iteration.
    pub objectives: Vec<f64>,
    /// Relative Frobenius change of `X` in each iteration.
    pub rel_changes: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest adjoint-structure deviation seen in a raw factor update.
    pub max_structure_deviation: f64,
    pub wall_time_s: f64,
}

/// Zeroes all four components of the entries the mask marks as missing.
pub fn project_mask(x: &QuatMatrix, mask: &MaskMatrix) -> Result<QuatMatrix> {
    mask.check_shape(x.shape())?;
    let mut out = x.clone();
    for p in [Plane::W, Plane::X, Plane::Y, Plane::Z] {
        for (v, &obs) in out.plane_mut(p).iter_mut().zip(mask.as_slice()) {
            if !obs {
                *v = 0.0;
            }
        }
    }
    Ok(out)
}

fn objective_from_product(prod: &ComplexMatrix, pair: &FactorPair, x: &QuatMatrix, lambda: f64) -> Result<f64> {
    let fx = embed_f(x);
    if prod.shape() != fx.shape() {
        return Err(Error::dims(fx.shape(), prod.shape()));
    }
    let fit: f64 = prod
        .as_slice()
        .iter()
        .zip(fx.as_slice())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(0.5 * fit + 0.5 * lambda * (pair.fu.frobenius_sq() + pair.fv.frobenius_sq()))
}

/// `½‖fU·fV − f(X)‖²_F + (λ/2)(‖fU‖²_F + ‖fV‖²_F)`.
pub fn objective_g(pair: &FactorPair, x: &QuatMatrix, lambda: f64) -> Result<f64> {
    let prod = pair.fu.matmul(&pair.fv)?;
    objective_from_product(&prod, pair, x, lambda)
}

/// Minimizer of `G` over `fU`: `fX·fVᴴ·(fV·fVᴴ + λI)⁻¹`.
pub fn update_u(fv: &ComplexMatrix, fx: &ComplexMatrix, lambda: f64) -> Result<ComplexMatrix> {
    if fx.cols() != fv.cols() {
        return Err(Error::dims((fx.rows(), fv.cols()), fx.shape()));
    }
    let fvh = fv.hermitian();
    let gram = fv.matmul(&fvh)?.add_identity(lambda)?;
    let rhs = fx.matmul(&fvh)?;
    // fU·A = R  ⇔  A·fUᴴ = Rᴴ, A Hermitian.
    Ok(hpd_solve(&gram, &rhs.hermitian())?.hermitian())
}

/// Minimizer of `G` over `fV`: `(fUᴴ·fU + λI)⁻¹·fUᴴ·fX`.
pub fn update_v(fu: &ComplexMatrix, fx: &ComplexMatrix, lambda: f64) -> Result<ComplexMatrix> {
    if fx.rows() != fu.rows() {
        return Err(Error::dims((fu.rows(), fx.cols()), fx.shape()));
    }
    let fuh = fu.hermitian();
    let gram = fuh.matmul(fu)?.add_identity(lambda)?;
    hpd_solve(&gram, &fuh.matmul(fx)?)
}

fn select_x(fitted: &QuatMatrix, y: &QuatMatrix, mask: &MaskMatrix, real: RealPart) -> QuatMatrix {
    let mut out = fitted.clone();
    for p in [Plane::W, Plane::X, Plane::Y, Plane::Z] {
        let fixed = real == RealPart::AlwaysObserved && p == Plane::W;
        let src = y.plane(p);
        for ((v, &obs), &yv) in out.plane_mut(p).iter_mut().zip(mask.as_slice()).zip(src) {
            if obs || fixed {
                *v = yv;
            }
        }
    }
    out
}

/// Observed entries copied from `y`, missing entries from `f⁻¹(fU·fV)`.
pub fn update_x(pair: &FactorPair, y: &QuatMatrix, mask: &MaskMatrix) -> Result<QuatMatrix> {
    update_x_with(pair, y, mask, RealPart::FollowMask)
}

pub fn update_x_with(pair: &FactorPair, y: &QuatMatrix, mask: &MaskMatrix, real: RealPart) -> Result<QuatMatrix> {
    mask.check_shape(y.shape())?;
    let fitted = inv_f(&pair.fu.matmul(&pair.fv)?, INV_F_TOL)?;
    if fitted.shape() != y.shape() {
        return Err(Error::dims(y.shape(), fitted.shape()));
    }
    Ok(select_x(&fitted, y, mask, real))
}

/// `f(V⁰)` with every quaternion component of `V⁰` uniform on `[0, 255]`.
pub fn initial_fv<R: Rng + ?Sized>(rng: &mut R, rank: usize, cols: usize) -> ComplexMatrix {
    let (lo, hi) = INIT_RANGE;
    let v = QuatMatrix::from_fn(rank, cols, |_, _| {
        Quaternion::new(
            rng.random_range(lo..=hi),
            rng.random_range(lo..=hi),
            rng.random_range(lo..=hi),
            rng.random_range(lo..=hi),
        )
    });
    embed_f(&v)
}

fn relative_change(new: &QuatMatrix, old: &QuatMatrix) -> f64 {
    let diff = new.try_sub(old).expect("iterates share a shape").frobenius();
    if diff == 0.0 {
        0.0
    } else {
        diff / old.frobenius()
    }
}

/// Diagnostics for one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iteration: usize,
    pub objective: f64,
    pub rel_change: f64,
    /// Structure deviation of the raw `fU` update (before re-projection).
    pub structure_u: f64,
    pub structure_v: f64,
}

/// Iteration state of one completion run.
#[derive(Debug, Clone)]
pub struct Lrqmc<'a> {
    y: &'a QuatMatrix,
    mask: &'a MaskMatrix,
    params: SolverParams,
    real: RealPart,
    x: QuatMatrix,
    fv: ComplexMatrix,
    fu: Option<ComplexMatrix>,
    iteration: usize,
}

impl<'a> Lrqmc<'a> {
    pub fn new(y: &'a QuatMatrix, mask: &'a MaskMatrix, params: SolverParams) -> Result<Self> {
        Self::with_real_part(y, mask, params, RealPart::FollowMask)
    }

    pub fn with_real_part(y: &'a QuatMatrix, mask: &'a MaskMatrix, params: SolverParams, real: RealPart) -> Result<Self> {
        params.validate()?;
        mask.check_shape(y.shape())?;
        if !y.is_finite() {
            return Err(Error::InvalidParameter("observation contains non-finite values".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let fv = initial_fv(&mut rng, params.rank, y.cols());
        Ok(Lrqmc {
            y,
            mask,
            params,
            real,
            x: y.clone(),
            fv,
            fu: None,
            iteration: 0,
        })
    }

    pub fn x(&self) -> &QuatMatrix {
        &self.x
    }

    pub fn fv(&self) -> &ComplexMatrix {
        &self.fv
    }

    /// Current factors; `None` before the first step.
    pub fn factors(&self) -> Option<FactorPair> {
        self.fu.as_ref().map(|fu| FactorPair {
            fu: fu.clone(),
            fv: self.fv.clone(),
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// One pass of the U, V and X updates.
    pub fn step(&mut self) -> Result<StepReport> {
        let lambda = self.params.lambda;
        let fx = embed_f(&self.x);

        let raw_u = update_u(&self.fv, &fx, lambda)?;
        let structure_u = structure_deviation(&raw_u)?;
        let fu = embed_f(&inv_f(&raw_u, INV_F_TOL)?);

        let raw_v = update_v(&fu, &fx, lambda)?;
        let structure_v = structure_deviation(&raw_v)?;
        let fv = embed_f(&inv_f(&raw_v, INV_F_TOL)?);

        let prod = fu.matmul(&fv)?;
        let fitted = inv_f(&prod, INV_F_TOL)?;
        let x_new = select_x(&fitted, self.y, self.mask, self.real);

        let rel_change = relative_change(&x_new, &self.x);
        let pair = FactorPair { fu, fv };
        let objective = objective_from_product(&prod, &pair, &x_new, lambda)?;
        self.iteration += 1;
        if !objective.is_finite() {
            return Err(Error::NonFiniteObjective {
                iteration: self.iteration,
            });
        }
        self.x = x_new;
        self.fu = Some(pair.fu);
        self.fv = pair.fv;
        Ok(StepReport {
            iteration: self.iteration,
            objective,
            rel_change,
            structure_u,
            structure_v,
        })
    }

    /// Iterates until the relative change reaches `rel_tol` or the iteration
    /// budget is spent.
    pub fn run(mut self) -> Result<(QuatMatrix, SolverTrace)> {
        let start = Instant::now();
        let mut trace = SolverTrace::default();
        while self.iteration < self.params.max_iters {
            let r = self.step()?;
            trace.objectives.push(r.objective);
            trace.rel_changes.push(r.rel_change);
            trace.max_structure_deviation = trace.max_structure_deviation.max(r.structure_u).max(r.structure_v);
            if r.rel_change <= self.params.rel_tol {
                trace.converged = true;
                break;
            }
        }
        trace.iterations = self.iteration;
        trace.wall_time_s = start.elapsed().as_secs_f64();
        Ok((self.x, trace))
    }
}

/// Completes `y` on the support of `mask`. Observed entries of the result
/// equal `y` exactly.
pub fn run_lrqmc(y: &QuatMatrix, mask: &MaskMatrix, params: &SolverParams) -> Result<(QuatMatrix, SolverTrace)> {
    Lrqmc::new(y, mask, *params)?.run()
}

pub fn run_lrqmc_with(
    y: &QuatMatrix,
    mask: &MaskMatrix,
    params: &SolverParams,
    real: RealPart,
) -> Result<(QuatMatrix, SolverTrace)> {
    Lrqmc::with_real_part(y, mask, *params, real)?.run()
}
