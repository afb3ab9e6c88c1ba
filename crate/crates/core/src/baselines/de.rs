use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    argmin, check_finite, check_probability, clip_row, distinct_others, evaluate_rows,
    push_population, require_population, uniform_population,
};
use crate::benchmarks::Problem;
use crate::error::Result;
use crate::optimizer::{Optimizer, OptimizerId};
use crate::record::{Evaluator, Recorder, RunRecord};

/// DE/rand/1/bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    /// Differential weight.
    pub f: f64,
    /// Crossover probability.
    pub cr: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self { f: 0.5, cr: 0.9 }
    }
}

pub fn run_de(
    problem: &Problem,
    n: usize,
    generations: usize,
    cfg: &DeConfig,
    seed: u64,
) -> Result<RunRecord> {
    check_finite("f", cfg.f)?;
    check_probability("cr", cfg.cr)?;
    require_population("de", 4, n)?;
    let d = problem.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(problem);
    let mut rec = Recorder::new(OptimizerId::De);

    let mut pop = uniform_population(problem, n, &mut rng);
    let mut fit = evaluate_rows(&mut eval, &pop)?;
    let b = argmin(&fit);
    push_population(&mut rec, problem, fit[b], &pop.row(b).to_owned(), &fit);

    let mut trial = vec![0.0; d];
    for _ in 0..generations {
        let parents = pop.clone();
        for i in 0..n {
            let r = distinct_others(&mut rng, n, i, 3);
            let jrand = rng.random_range(0..d);
            for (j, t) in trial.iter_mut().enumerate() {
                *t = if j == jrand || rng.random::<f64>() < cfg.cr {
                    parents[[r[0], j]] + cfg.f * (parents[[r[1], j]] - parents[[r[2], j]])
                } else {
                    parents[[i, j]]
                };
            }
            clip_row(problem, &mut trial);
            let ft = eval.eval(&trial)?;
            if ft <= fit[i] {
                fit[i] = ft;
                pop.row_mut(i)
                    .assign(&ndarray::ArrayView1::from(&trial[..]));
            }
        }
        let b = argmin(&fit);
        push_population(&mut rec, problem, fit[b], &pop.row(b).to_owned(), &fit);
    }
    Ok(rec.finish(problem, seed, n, eval.count()))
}

#[derive(Debug, Clone, Default)]
pub struct De {
    pub cfg: DeConfig,
}

impl De {
    pub fn new(cfg: DeConfig) -> Self {
        Self { cfg }
    }
}

impl Optimizer for De {
    fn id(&self) -> OptimizerId {
        OptimizerId::De
    }

    fn run(&self, problem: &Problem, pop: usize, gens: usize, seed: u64) -> Result<RunRecord> {
        run_de(problem, pop, gens, &self.cfg, seed)
    }
}
