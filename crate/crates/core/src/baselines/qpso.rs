use ndarray::Axis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    argmin, check_finite, clip_row, evaluate_rows, linear_schedule, push_population,
    uniform_population,
};
use crate::benchmarks::Problem;
use crate::error::Result;
use crate::optimizer::{Optimizer, OptimizerId};
use crate::record::{Evaluator, Recorder, RunRecord};

/// Quantum-behaved particle swarm with a linearly decreasing contraction–expansion
/// coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpsoConfig {
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for QpsoConfig {
    fn default() -> Self {
        Self {
            beta_start: 1.0,
            beta_end: 0.5,
        }
    }
}

pub fn run_qpso(
    problem: &Problem,
    n: usize,
    generations: usize,
    cfg: &QpsoConfig,
    seed: u64,
) -> Result<RunRecord> {
    check_finite("beta_start", cfg.beta_start)?;
    check_finite("beta_end", cfg.beta_end)?;
    super::require_population("qpso", 1, n)?;
    let d = problem.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(problem);
    let mut rec = Recorder::new(OptimizerId::Qpso);

    let mut x = uniform_population(problem, n, &mut rng);
    let mut fit = evaluate_rows(&mut eval, &x)?;
    let mut pbest = x.clone();
    let mut pbest_fit = fit.clone();
    let g = argmin(&pbest_fit);
    let mut gbest = pbest.row(g).to_owned();
    let mut gbest_fit = pbest_fit[g];
    push_population(&mut rec, problem, gbest_fit, &gbest, &fit);

    for t in 0..generations {
        let beta = linear_schedule(
            cfg.beta_start,
            cfg.beta_end,
            t,
            generations.saturating_sub(1).max(1),
        );
        let mbest = pbest.mean_axis(Axis(0)).expect("non-empty population");
        for i in 0..n {
            for j in 0..d {
                let phi: f64 = rng.random();
                let local = phi * pbest[[i, j]] + (1.0 - phi) * gbest[j];
                // 1 − u lies in (0, 1], so the logarithm stays finite
                let u: f64 = 1.0 - rng.random::<f64>();
                let spread = beta * (mbest[j] - x[[i, j]]).abs() * (1.0 / u).ln();
                x[[i, j]] = if rng.random::<bool>() {
                    local + spread
                } else {
                    local - spread
                };
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
pub struct Qpso {
    pub cfg: QpsoConfig,
}

impl Qpso {
    pub fn new(cfg: QpsoConfig) -> Self {
        Self { cfg }
    }
}

impl Optimizer for Qpso {
    fn id(&self) -> OptimizerId {
        OptimizerId::Qpso
    }

    fn run(&self, problem: &Problem, pop: usize, gens: usize, seed: u64) -> Result<RunRecord> {
        run_qpso(problem, pop, gens, &self.cfg, seed)
    }
}
