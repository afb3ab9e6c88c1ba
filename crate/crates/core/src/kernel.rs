//! Exact discretisation of the scalar second-order stochastic oscillator.
//!
//! Each element of each particle evolves as `m ẍ + c ẋ + k'(x − ᾱ) = w(t)` with white
//! forcing `w`. In shifted coordinates `x' = x − ᾱ` the state `(x', ẋ')` follows the
//! linear SDE `dx = F x dt + L dβ`, `L = (0, 1)ᵀ`, whose transition over `Δt` is Gaussian
//! with mean `A x` and covariance `Q Σ`.

use nalgebra::{Matrix2, Matrix4, Vector2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{PaoError, Result};
use crate::linalg::{cholesky2, eigen_moduli2, expm};

/// Physical hyperparameters of the particle dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Inertia coefficient.
    pub m: f64,
    /// Damping ratio.
    pub zeta: f64,
    /// One stiffness per attractor.
    pub k: Vec<f64>,
    /// Stochastic scale multiplying the swarm noise measure.
    pub q0: f64,
    /// Integration interval.
    pub dt: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            m: 1.0,
            zeta: 0.2,
            k: vec![1.0, 1.0],
            q0: 1.0,
            dt: 1.0,
        }
    }
}

impl Hyperparams {
    /// Total stiffness `k' = Σ k_r`.
    pub fn total_stiffness(&self) -> f64 {
        self.k.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PaoError::InvalidHyperparams(msg));
        if !(self.m > 0.0 && self.m.is_finite()) {
            return bad(format!("m must be positive and finite, got {}", self.m));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive and finite, got {}", self.dt));
        }
        if !(self.zeta >= 0.0 && self.zeta.is_finite()) {
            return bad(format!("zeta must be non-negative, got {}", self.zeta));
        }
        if !(self.q0 >= 0.0 && self.q0.is_finite()) {
            return bad(format!("q0 must be non-negative, got {}", self.q0));
        }
        if self.k.is_empty() {
            return bad("at least one stiffness is required".into());
        }
        if let Some(k) = self.k.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return bad(format!("stiffnesses must be non-negative, got {k}"));
        }
        if self.total_stiffness() <= 0.0 {
            return bad("total stiffness must be positive".into());
        }
        Ok(())
    }
}

/// Drift matrix `F` of the first-order state-space form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix2<f64>);

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }
}

pub fn build_drift_matrix(hp: &Hyperparams) -> Result<DriftMatrix> {
    hp.validate()?;
    let ratio = hp.total_stiffness() / hp.m;
    Ok(DriftMatrix(Matrix2::new(
        0.0,
        1.0,
        -ratio,
        -2.0 * ratio.sqrt() * hp.zeta,
    )))
}

/// Joint computation of the transition matrix and the process-noise covariance of
/// `dx = F x dt + L dβ` with diffusion `q`, from a single 4×4 matrix exponential.
///
/// `exp([[F, L q Lᵀ], [0, −Fᵀ]] h) = [[A, Σ A⁻ᵀ], [0, A⁻ᵀ]]`, so `Σ` is the upper-right
/// block times the inverse of the lower-right block. The lower-right block grows like
/// `exp(|λ| h)` for fast modes, so the decomposition is taken over a sub-interval
/// `h = dt / 2^s` short enough to keep it well conditioned, and the result is doubled
/// back up with the exact flow identities `A(2h) = A(h)²`, `Σ(2h) = A Σ Aᵀ + Σ`.
pub fn matrix_fraction_decomposition(
    f: &DriftMatrix,
    q: f64,
    dt: f64,
) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    if !(dt > 0.0) || !(q >= 0.0) || !dt.is_finite() || !q.is_finite() {
        return Err(PaoError::InvalidHyperparams(format!(
            "matrix fraction decomposition needs dt > 0 and q >= 0 (dt = {dt}, q = {q})"
        )));
    }
    let fm = f.0;
    if !fm.iter().all(|v| v.is_finite()) {
        return Err(PaoError::NumericalFailure(
            "drift matrix has non-finite entries".into(),
        ));
    }
    let norm = fm.abs().row_sum().max() * dt;
    let halvings = if norm > 1.0 {
        norm.log2().ceil() as i32
    } else {
        0
    };
    if halvings > MAX_HALVINGS {
        return Err(PaoError::NumericalFailure(format!(
            "drift norm × dt = {norm:e} is too large to discretise"
        )));
    }
    let h = dt / 2f64.powi(halvings);

    let mut phi = Matrix4::zeros();
    phi.fixed_view_mut::<2, 2>(0, 0).copy_from(&fm);
    phi[(1, 3)] = q;
    phi.fixed_view_mut::<2, 2>(2, 2)
        .copy_from(&(-fm.transpose()));
    let big = expm(&(phi * h));
    if !big.iter().all(|v| v.is_finite()) {
        return Err(PaoError::NumericalFailure(
            "matrix exponential produced non-finite entries".into(),
        ));
    }
    let mut a: Matrix2<f64> = big.fixed_view::<2, 2>(0, 0).into_owned();
    let upper_right: Matrix2<f64> = big.fixed_view::<2, 2>(0, 2).into_owned();
    let lower_right: Matrix2<f64> = big.fixed_view::<2, 2>(2, 2).into_owned();
    let det = lower_right.determinant();
    if !(det.abs() > f64::EPSILON * lower_right.amax().powi(2)) {
        return Err(PaoError::NumericalFailure(format!(
            "lower-right block is singular (det = {det:e})"
        )));
    }
    let inv = lower_right
        .try_inverse()
        .ok_or_else(|| PaoError::NumericalFailure("lower-right block is singular".into()))?;
    let mut sigma = upper_right * inv;
    sigma = (sigma + sigma.transpose()) * 0.5;
    for _ in 0..halvings {
        sigma = a * sigma * a.transpose() + sigma;
        sigma = (sigma + sigma.transpose()) * 0.5;
        a = a * a;
    }
    Ok((a, sigma))
}

/// Upper bound on sub-interval halvings; beyond this `dt` is far outside any useful range.
const MAX_HALVINGS: i32 = 256;

/// Precomputed Gaussian transition kernel for one scalar element under unit diffusion.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    pub a: Matrix2<f64>,
    pub sigma_unit: Matrix2<f64>,
    pub h: Matrix2<f64>,
    pub drift: DriftMatrix,
    pub dt: f64,
}

pub fn build_kernel(hp: &Hyperparams) -> Result<TransitionKernel> {
    let drift = build_drift_matrix(hp)?;
    let (a, sigma_unit) = matrix_fraction_decomposition(&drift, 1.0, hp.dt)?;
    let h = cholesky2(&sigma_unit);
    Ok(TransitionKernel {
        a,
        sigma_unit,
        h,
        drift,
        dt: hp.dt,
    })
}

impl TransitionKernel {
    /// `a·x + sqrt(noise_variance)·h·d` for a given standard-normal pair `d`.
    #[inline]
    pub fn propagate(&self, x: Vector2<f64>, noise_variance: f64, d: Vector2<f64>) -> Vector2<f64> {
        let mean = self.a * x;
        if noise_variance > 0.0 {
            mean + self.h * d * noise_variance.sqrt()
        } else {
            mean
        }
    }

    /// Eigenvalue moduli of `a`, largest first.
    pub fn eigen_moduli(&self) -> [f64; 2] {
        eigen_moduli2(&self.a)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigen_moduli()[0]
    }
}

/// Draws the next state from `N(a·x, noise_variance·sigma_unit)`.
///
/// With zero variance no normal draws are taken from `rng`.
pub fn sample_transition<R: Rng + ?Sized>(
    kernel: &TransitionKernel,
    x: Vector2<f64>,
    noise_variance: f64,
    rng: &mut R,
) -> Vector2<f64> {
    if noise_variance > 0.0 {
        let d = Vector2::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        kernel.propagate(x, noise_variance, d)
    } else {
        kernel.a * x
    }
}

/// Log density of `x_to` under `N(a·x_from, noise_variance·sigma_unit)`.
pub fn transition_logpdf(
    kernel: &TransitionKernel,
    x_from: Vector2<f64>,
    x_to: Vector2<f64>,
    noise_variance: f64,
) -> Result<f64> {
    if !(noise_variance > 0.0) {
        return Err(PaoError::DegenerateCovariance(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    let cov = kernel.sigma_unit * noise_variance;
    let det = cov.determinant();
    let scale = cov.amax();
    if !(det > 1e-14 * scale * scale) {
        return Err(PaoError::DegenerateCovariance(format!(
            "covariance determinant {det:e} is not positive"
        )));
    }
    let inv = cov
        .try_inverse()
        .ok_or_else(|| PaoError::DegenerateCovariance("covariance is singular".into()))?;
    let r = x_to - kernel.a * x_from;
    let maha = (r.transpose() * inv * r)[(0, 0)];
    Ok(-(2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln() - 0.5 * maha)
}
