use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    argmin, check_finite, check_probability, clip_row, distinct_others, evaluate_rows,
    push_population, require_population, uniform_population,
};
use crate::benchmarks::Problem;
use crate::error::{PaoError, Result};
use crate::optimizer::{Optimizer, OptimizerId};
use crate::record::{Evaluator, Recorder, RunRecord};

/// Self-adaptive DE choosing between rand/1/bin and current-to-best/2/bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SadeConfig {
    /// Generations between strategy-probability updates.
    pub learning_period: usize,
    pub cr_mean: f64,
    pub cr_std: f64,
    pub f_mean: f64,
    pub f_std: f64,
}

impl Default for SadeConfig {
    fn default() -> Self {
        Self {
            learning_period: 10,
            cr_mean: 0.5,
            cr_std: 0.1,
            f_mean: 0.5,
            f_std: 0.3,
        }
    }
}

impl SadeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_period == 0 {
            return Err(PaoError::InvalidConfig(
                "learning_period must be at least 1".into(),
            ));
        }
        check_probability("cr_mean", self.cr_mean)?;
        for (n, v) in [
            ("cr_std", self.cr_std),
            ("f_mean", self.f_mean),
            ("f_std", self.f_std),
        ] {
            check_finite(n, v)?;
            if v < 0.0 && n != "f_mean" {
                return Err(PaoError::InvalidConfig(format!("{n} must be non-negative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    success: u32,
    failure: u32,
}

/// Probability of the first strategy from success/failure counts of both.
fn strategy_probability(first: Tally, second: Tally, current: f64) -> f64 {
    let (ns1, nf1) = (first.success as f64, first.failure as f64);
    let (ns2, nf2) = (second.success as f64, second.failure as f64);
    let num = ns1 * (ns2 + nf2);
    let den = ns2 * (ns1 + nf1) + num;
    if den > 0.0 {
        num / den
    } else {
        current
    }
}

pub fn run_sade(
    problem: &Problem,
    n: usize,
    generations: usize,
    cfg: &SadeConfig,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    require_population("sade", 5, n)?;
    let d = problem.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(problem);
    let mut rec = Recorder::new(OptimizerId::Sade);
    let f_dist =
        Normal::new(cfg.f_mean, cfg.f_std).map_err(|e| PaoError::InvalidConfig(e.to_string()))?;
    let cr_dist =
        Normal::new(cfg.cr_mean, cfg.cr_std).map_err(|e| PaoError::InvalidConfig(e.to_string()))?;

    let mut pop = uniform_population(problem, n, &mut rng);
    let mut fit = evaluate_rows(&mut eval, &pop)?;
    let b = argmin(&fit);
    push_population(&mut rec, problem, fit[b], &pop.row(b).to_owned(), &fit);

    let mut p_rand = 0.5;
    let mut tallies = [Tally::default(); 2];
    let mut trial = vec![0.0; d];
    for t in 0..generations {
        let parents = pop.clone();
        let best = argmin(&fit);
        for i in 0..n {
            let use_rand = rng.random::<f64>() < p_rand;
            let f = f_dist.sample(&mut rng);
            let cr = cr_dist.sample(&mut rng).clamp(0.0, 1.0);
            let r = distinct_others(&mut rng, n, i, 4);
            let jrand = rng.random_range(0..d);
            for (j, tj) in trial.iter_mut().enumerate() {
                *tj = if j == jrand || rng.random::<f64>() < cr {
                    if use_rand {
                        parents[[r[0], j]] + f * (parents[[r[1], j]] - parents[[r[2], j]])
                    } else {
                        let xi = parents[[i, j]];
                        xi + f * (parents[[best, j]] - xi)
                            + f * (parents[[r[0], j]] - parents[[r[1], j]])
                            + f * (parents[[r[2], j]] - parents[[r[3], j]])
                    }
                } else {
                    parents[[i, j]]
                };
            }
            clip_row(problem, &mut trial);
            let ft = eval.eval(&trial)?;
            let tally = &mut tallies[usize::from(!use_rand)];
            if ft <= fit[i] {
                fit[i] = ft;
                pop.row_mut(i)
                    .assign(&ndarray::ArrayView1::from(&trial[..]));
                tally.success += 1;
            } else {
                tally.failure += 1;
            }
        }
        if (t + 1) % cfg.learning_period == 0 {
            p_rand = strategy_probability(tallies[0], tallies[1], p_rand);
            tallies = [Tally::default(); 2];
        }
        let b = argmin(&fit);
        push_population(&mut rec, problem, fit[b], &pop.row(b).to_owned(), &fit);
    }
    Ok(rec.finish(problem, seed, n, eval.count()))
}

#[derive(Debug, Clone, Default)]
pub struct Sade {
    pub cfg: SadeConfig,
}

impl Sade {
    pub fn new(cfg: SadeConfig) -> Self {
        Self { cfg }
    }
}

impl Optimizer for Sade {
    fn id(&self) -> OptimizerId {
        OptimizerId::Sade
    }

    fn run(&self, problem: &Problem, pop: usize, gens: usize, seed: u64) -> Result<RunRecord> {
        run_sade(problem, pop, gens, &self.cfg, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_probability_update() {
        let s = |success, failure| Tally { success, failure };
        // equal success rates keep the split even
        assert!((strategy_probability(s(5, 5), s(5, 5), 0.3) - 0.5).abs() < 1e-15);
        // only the first strategy succeeds
        assert_eq!(strategy_probability(s(4, 0), s(0, 4), 0.5), 1.0);
        // no information keeps the current value
        assert_eq!(strategy_probability(s(0, 0), s(0, 0), 0.37), 0.37);
    }
}
