//! Comparison optimisers sharing the PAO run contract.

mod de;
mod pso;
mod qpso;
mod sade;

pub use de::{run_de, De, DeConfig};
pub use pso::{run_pso, Pso, PsoConfig};
pub use qpso::{run_qpso, Qpso, QpsoConfig};
pub use sade::{run_sade, Sade, SadeConfig};

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::benchmarks::Problem;
use crate::error::{PaoError, Result};
use crate::record::{Evaluator, Recorder};

/// Uniform random population inside the problem bounds.
pub(crate) fn uniform_population<R: Rng + ?Sized>(
    problem: &Problem,
    n: usize,
    rng: &mut R,
) -> Array2<f64> {
    let d = problem.dim;
    let mut pop = Array2::zeros((n, d));
    for i in 0..n {
        for j in 0..d {
            let (lo, hi) = (problem.lower[j], problem.upper[j]);
            pop[[i, j]] = lo + rng.random::<f64>() * (hi - lo);
        }
    }
    pop
}

pub(crate) fn evaluate_rows(eval: &mut Evaluator<'_>, pop: &Array2<f64>) -> Result<Array1<f64>> {
    let mut out = Array1::zeros(pop.nrows());
    for (i, row) in pop.outer_iter().enumerate() {
        out[i] = eval.eval(row.as_slice().expect("standard layout"))?;
    }
    Ok(out)
}

pub(crate) fn clip_row(problem: &Problem, row: &mut [f64]) {
    for (j, x) in row.iter_mut().enumerate() {
        *x = x.clamp(problem.lower[j], problem.upper[j]);
    }
}

/// Index of the first minimum.
pub(crate) fn argmin(values: &Array1<f64>) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn require_population(what: &'static str, needed: usize, got: usize) -> Result<()> {
    if got < needed {
        Err(PaoError::InsufficientPopulation { what, needed, got })
    } else {
        Ok(())
    }
}

/// `k` distinct indices in `0..n`, none equal to `exclude`.
pub(crate) fn distinct_others<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    exclude: usize,
    k: usize,
) -> Vec<usize> {
    rand::seq::index::sample(rng, n - 1, k)
        .iter()
        .map(|p| if p >= exclude { p + 1 } else { p })
        .collect()
}

/// Linear interpolation from `start` to `end` as `t` goes from 0 to `total`.
pub(crate) fn linear_schedule(start: f64, end: f64, t: usize, total: usize) -> f64 {
    if total == 0 {
        return start;
    }
    start + (end - start) * (t as f64 / total as f64)
}

pub(crate) fn push_population(
    rec: &mut Recorder,
    problem: &Problem,
    best_fit: f64,
    best_pos: &Array1<f64>,
    fitness: &Array1<f64>,
) {
    rec.push(
        problem,
        best_fit,
        best_pos.as_slice().expect("contiguous"),
        fitness.iter(),
    );
}

pub(crate) fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(PaoError::InvalidConfig(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

pub(crate) fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(PaoError::InvalidConfig(format!(
            "{name} must be finite, got {v}"
        )))
    }
}
