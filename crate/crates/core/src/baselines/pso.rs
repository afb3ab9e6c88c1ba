use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    argmin, check_finite, clip_row, evaluate_rows, linear_schedule, push_population,
    uniform_population,
};
use crate::benchmarks::Problem;
use crate::error::{PaoError, Result};
use crate::optimizer::{Optimizer, OptimizerId};
use crate::record::{Evaluator, Recorder, RunRecord};

/// Inertia-weight particle swarm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub inertia_start: f64,
    pub inertia_end: f64,
    /// Cognitive coefficient.
    pub c1: f64,
    /// Social coefficient.
    pub c2: f64,
    /// Velocity limit as a fraction of the domain width.
    pub vmax_fraction: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            inertia_start: 0.9,
            inertia_end: 0.4,
            c1: 2.0,
            c2: 2.0,
            vmax_fraction: 0.5,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("inertia_start", self.inertia_start),
            ("inertia_end", self.inertia_end),
            ("c1", self.c1),
            ("c2", self.c2),
            ("vmax_fraction", self.vmax_fraction),
        ] {
            check_finite(n, v)?;
        }
        if self.vmax_fraction <= 0.0 {
            return Err(PaoError::InvalidConfig(
                "vmax_fraction must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn run_pso(
    problem: &Problem,
    n: usize,
    generations: usize,
    cfg: &PsoConfig,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    super::require_population("pso", 1, n)?;
    let d = problem.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(problem);
    let mut rec = Recorder::new(OptimizerId::Pso);

    let vmax: Vec<f64> = (0..d)
        .map(|j| cfg.vmax_fraction * (problem.upper[j] - problem.lower[j]))
        .collect();
    let mut x = uniform_population(problem, n, &mut rng);
    let mut v = Array2::from_shape_fn((n, d), |(_, j)| rng.random_range(-vmax[j]..=vmax[j]));
    let mut fit = evaluate_rows(&mut eval, &x)?;
    let mut pbest = x.clone();
    let mut pbest_fit = fit.clone();
    let g = argmin(&pbest_fit);
    let mut gbest = pbest.row(g).to_owned();
    let mut gbest_fit = pbest_fit[g];
    push_population(&mut rec, problem, gbest_fit, &gbest, &fit);

    for t in 0..generations {
        let w = linear_schedule(
            cfg.inertia_start,
            cfg.inertia_end,
            t,
            generations.saturating_sub(1).max(1),
        );
        for i in 0..n {
            for j in 0..d {
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                let vel = w * v[[i, j]]
                    + cfg.c1 * r1 * (pbest[[i, j]] - x[[i, j]])
                    + cfg.c2 * r2 * (gbest[j] - x[[i, j]]);
                v[[i, j]] = vel.clamp(-vmax[j], vmax[j]);
                x[[i, j]] += v[[i, j]];
            }
            clip_row(problem, x.row_mut(i).into_slice().expect("standard layout"));
        }
        fit = evaluate_rows(&mut eval, &x)?;
        for i in 0..n {
            if fit[i] < pbest_fit[i] {
                pbest_fit[i] = fit[i];
                pbest.row_mut(i).assign(&x.row(i));
            }
        }
        for i in 0..n {
            if pbest_fit[i] < gbest_fit {
                gbest_fit = pbest_fit[i];
                gbest.assign(&pbest.row(i));
            }
        }
        push_population(&mut rec, problem, gbest_fit, &gbest, &fit);
    }
    Ok(rec.finish(problem, seed, n, eval.count()))
}

#[derive(Debug, Clone, Default)]
pub struct Pso {
    pub cfg: PsoConfig,
}

impl Pso {
    pub fn new(cfg: PsoConfig) -> Self {
        Self { cfg }
    }
}

impl Optimizer for Pso {
    fn id(&self) -> OptimizerId {
        OptimizerId::Pso
    }

    fn run(&self, problem: &Problem, pop: usize, gens: usize, seed: u64) -> Result<RunRecord> {
        run_pso(problem, pop, gens, &self.cfg, seed)
    }
}
