//! The particle attractor optimiser.
//!
//! Every element of every particle is an independent damped oscillator pulled towards the
//! stiffness-weighted centroid of its attractors and excited by white noise whose
//! intensity is `q0·ν`. Because the dynamics are linear and time-invariant within a
//! step, one precomputed [`TransitionKernel`] moves the whole swarm exactly.

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::attractors::{
    compute_attractors, noise_field, weighted_centroid, AttractorSpec, NoiseModel,
};
use crate::benchmarks::Problem;
use crate::error::{PaoError, Result};
use crate::kernel::{build_kernel, Hyperparams, TransitionKernel};
use crate::optimizer::{Optimizer, OptimizerId};
use crate::record::{Evaluator, Recorder, RunRecord};
use crate::swarm::{BoundsPolicy, Swarm, POS, VEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityInit {
    #[default]
    Zero,
    /// Uniform in `±(upper − lower)/(2Δt)` per dimension.
    UniformScaled,
}

impl std::str::FromStr for VelocityInit {
    type Err = PaoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "zero" => Ok(VelocityInit::Zero),
            "uniform-scaled" | "uniform" => Ok(VelocityInit::UniformScaled),
            other => Err(PaoError::InvalidConfig(format!(
                "unknown velocity init `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaoConfig {
    pub hp: Hyperparams,
    pub specs: Vec<AttractorSpec>,
    pub bounds_policy: BoundsPolicy,
    pub velocity_init: VelocityInit,
    #[serde(default)]
    pub noise_model: NoiseModel,
}

impl Default for PaoConfig {
    /// Local and global best attractors with unit stiffness, unit mass, ζ = 0.2,
    /// q0 = 1, Δt = 1.
    fn default() -> Self {
        Self {
            hp: Hyperparams::default(),
            specs: vec![AttractorSpec::LocalBest, AttractorSpec::GlobalBest],
            bounds_policy: BoundsPolicy::Clip,
            velocity_init: VelocityInit::Zero,
            noise_model: NoiseModel::LocalGlobalGap,
        }
    }
}

impl PaoConfig {
    pub fn validate(&self) -> Result<()> {
        self.hp.validate()?;
        if self.specs.len() != self.hp.k.len() {
            return Err(PaoError::InvalidConfig(format!(
                "{} attractors but {} stiffnesses",
                self.specs.len(),
                self.hp.k.len()
            )));
        }
        self.specs.iter().try_for_each(AttractorSpec::validate)
    }
}

pub fn initialize_swarm<R: Rng + ?Sized>(
    eval: &mut Evaluator<'_>,
    n: usize,
    cfg: &PaoConfig,
    rng: &mut R,
) -> Result<Swarm> {
    if n == 0 {
        return Err(PaoError::InsufficientPopulation {
            what: "pao",
            needed: 1,
            got: 0,
        });
    }
    let problem = eval.problem();
    let d = problem.dim;
    let mut state = Array3::zeros((n, d, 2));
    for i in 0..n {
        for j in 0..d {
            let (lo, hi) = (problem.lower[j], problem.upper[j]);
            state[[i, j, POS]] = lo + rng.random::<f64>() * (hi - lo);
        }
    }
    if cfg.velocity_init == VelocityInit::UniformScaled {
        for i in 0..n {
            for j in 0..d {
                let vmax = (problem.upper[j] - problem.lower[j]) / (2.0 * cfg.hp.dt);
                state[[i, j, VEL]] = rng.random_range(-vmax..=vmax);
            }
        }
    }
    Swarm::from_state(state, eval)
}

/// Advances every `(x', ẋ')` pair of a state tensor in place.
///
/// Positions are shifted by `centroid` before the transition and shifted back after it;
/// velocities are carried unchanged since the attractors are fixed over the step.
/// `variance[[i, j]]` is the diffusion of element `j` of particle `i`; `draws` holds one
/// standard-normal pair per element and is only read where the variance is positive.
pub fn move_swarm(
    state: &mut Array3<f64>,
    kernel: &TransitionKernel,
    centroid: &Array2<f64>,
    variance: &Array2<f64>,
    draws: Option<&Array3<f64>>,
) {
    let a = &kernel.a;
    let h = &kernel.h;
    let (n, d, _) = state.dim();
    for i in 0..n {
        for j in 0..d {
            let c = centroid[[i, j]];
            let x = state[[i, j, POS]] - c;
            let v = state[[i, j, VEL]];
            let mut nx = a[(0, 0)] * x + a[(0, 1)] * v;
            let mut nv = a[(1, 0)] * x + a[(1, 1)] * v;
            let var = variance[[i, j]];
            if var > 0.0 {
                let draws = draws.expect("normal draws are required when variance > 0");
                let s = var.sqrt();
                let (d0, d1) = (s * draws[[i, j, 0]], s * draws[[i, j, 1]]);
                nx += h[(0, 0)] * d0 + h[(0, 1)] * d1;
                nv += h[(1, 0)] * d0 + h[(1, 1)] * d1;
            }
            state[[i, j, POS]] = nx + c;
            state[[i, j, VEL]] = nv;
        }
    }
}

/// Diffusion `q0·ν` of every element for the current swarm.
pub fn element_variance(swarm: &Swarm, cfg: &PaoConfig) -> Array2<f64> {
    let mut v = noise_field(swarm, cfg.noise_model);
    v.mapv_inplace(|nu| cfg.hp.q0 * nu);
    v
}

/// One swarm-synchronous generation. Returns the mean noise scale `ν` over all elements.
///
/// Random draws are taken from `rng` in a fixed order: attractor draws first, then an
/// `N × D × 2` standard-normal tensor in particle, dimension, state order (skipped when
/// every element has zero diffusion).
pub fn step_swarm<R: Rng + ?Sized>(
    swarm: &mut Swarm,
    kernel: &TransitionKernel,
    cfg: &PaoConfig,
    eval: &mut Evaluator<'_>,
    rng: &mut R,
) -> Result<f64> {
    let aset = compute_attractors(swarm, &cfg.specs, &cfg.hp.k, rng)?;
    let centroid = weighted_centroid(&aset);
    let nu = noise_field(swarm, cfg.noise_model);
    let variance = element_variance(swarm, cfg);
    let draws = variance.iter().any(|v| *v > 0.0).then(|| {
        let (n, d) = (swarm.len(), swarm.dim());
        Array3::from_shape_simple_fn((n, d, 2), || rng.sample(StandardNormal))
    });
    move_swarm(
        &mut swarm.state,
        kernel,
        &centroid,
        &variance,
        draws.as_ref(),
    );
    cfg.bounds_policy.enforce(&mut swarm.state, eval.problem());
    swarm.evaluate(eval)?;
    swarm.generation += 1;
    Ok(nu.mean().unwrap_or(0.0))
}

pub fn run_pao(
    problem: &Problem,
    n: usize,
    generations: usize,
    cfg: &PaoConfig,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    let kernel = build_kernel(&cfg.hp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(problem);
    let mut rec = Recorder::new(OptimizerId::Pao);

    let mut swarm = initialize_swarm(&mut eval, n, cfg, &mut rng)?;
    record(&mut rec, problem, &swarm);
    rec.push_noise_scale(noise_field(&swarm, cfg.noise_model).mean().unwrap_or(0.0));
    for _ in 0..generations {
        let nu = step_swarm(&mut swarm, &kernel, cfg, &mut eval, &mut rng)?;
        record(&mut rec, problem, &swarm);
        rec.push_noise_scale(nu);
    }
    Ok(rec.finish(problem, seed, n, eval.count()))
}

fn record(rec: &mut Recorder, problem: &Problem, swarm: &Swarm) {
    rec.push(
        problem,
        swarm.global_best_fit,
        swarm.global_best_pos.as_slice().expect("contiguous"),
        swarm.fitness.iter(),
    );
}

/// [`Optimizer`] adapter for [`run_pao`].
#[derive(Debug, Clone, Default)]
pub struct Pao {
    pub cfg: PaoConfig,
}

impl Pao {
    pub fn new(cfg: PaoConfig) -> Self {
        Self { cfg }
    }
}

impl Optimizer for Pao {
    fn id(&self) -> OptimizerId {
        OptimizerId::Pao
    }

    fn run(&self, problem: &Problem, pop: usize, gens: usize, seed: u64) -> Result<RunRecord> {
        run_pao(problem, pop, gens, &self.cfg, seed)
    }
}
