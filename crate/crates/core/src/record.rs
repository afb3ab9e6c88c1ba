//! Run records and the evaluation bookkeeping shared by every optimiser.

use serde::{Deserialize, Serialize};

use crate::benchmarks::Problem;
use crate::error::{PaoError, Result};
use crate::optimizer::OptimizerId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub g: usize,
    pub best: f64,
    pub mean: f64,
    pub shifted_best: f64,
}

/// Convergence history of one seeded optimiser run.
///
/// Serialises to one JSON object per line. `best_positions` and `noise_scale` are
/// in-memory diagnostics only and are not persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub optimizer: OptimizerId,
    pub problem: String,
    pub dim: usize,
    pub seed: u64,
    pub pop: usize,
    pub gens: usize,
    pub evals: u64,
    pub history: Vec<HistoryEntry>,
    pub duration_ms: u64,
    #[serde(skip)]
    pub best_positions: Vec<Vec<f64>>,
    #[serde(skip)]
    pub noise_scale: Vec<f64>,
}

impl RunRecord {
    pub fn final_best(&self) -> Option<f64> {
        self.history.last().map(|h| h.best)
    }

    pub fn final_shifted_best(&self) -> Option<f64> {
        self.history.last().map(|h| h.shifted_best)
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Copy with wall-clock fields zeroed, for byte-level comparison of runs.
    pub fn without_timing(&self) -> RunRecord {
        RunRecord {
            duration_ms: 0,
            ..self.clone()
        }
    }
}

pub fn run_id(optimizer: OptimizerId, problem: &Problem, seed: u64) -> String {
    format!(
        "{}-{}-{}d-{:016x}",
        optimizer,
        problem.name(),
        problem.dim,
        seed
    )
}

/// Counts objective calls and rejects non-finite values.
#[derive(Debug)]
pub struct Evaluator<'a> {
    problem: &'a Problem,
    count: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Self { problem, count: 0 }
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.count += 1;
        let v = self.problem.evaluate(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(PaoError::ObjectiveEvaluation(x.to_vec()))
        }
    }
}

/// Accumulates per-generation history for a run.
#[derive(Debug)]
pub struct Recorder {
    optimizer: OptimizerId,
    history: Vec<HistoryEntry>,
    best_positions: Vec<Vec<f64>>,
    noise_scale: Vec<f64>,
    started: std::time::Instant,
}

impl Recorder {
    pub fn new(optimizer: OptimizerId) -> Self {
        Self {
            optimizer,
            history: Vec::new(),
            best_positions: Vec::new(),
            noise_scale: Vec::new(),
            started: std::time::Instant::now(),
        }
    }

    pub fn push<'f>(
        &mut self,
        problem: &Problem,
        best: f64,
        best_pos: &[f64],
        fitness: impl IntoIterator<Item = &'f f64>,
    ) {
        let (sum, n) = fitness
            .into_iter()
            .fold((0.0, 0usize), |(s, n), f| (s + f, n + 1));
        self.history.push(HistoryEntry {
            g: self.history.len(),
            best,
            mean: if n > 0 { sum / n as f64 } else { f64::NAN },
            shifted_best: problem.shift_to_zero(best),
        });
        self.best_positions.push(best_pos.to_vec());
    }

    pub fn push_noise_scale(&mut self, nu: f64) {
        self.noise_scale.push(nu);
    }

    pub fn finish(self, problem: &Problem, seed: u64, pop: usize, evals: u64) -> RunRecord {
        let gens = self.history.len().saturating_sub(1);
        RunRecord {
            run_id: run_id(self.optimizer, problem, seed),
            optimizer: self.optimizer,
            problem: problem.name().to_string(),
            dim: problem.dim,
            seed,
            pop,
            gens,
            evals,
            history: self.history,
            duration_ms: self.started.elapsed().as_millis() as u64,
            best_positions: self.best_positions,
            noise_scale: self.noise_scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::make_problem;

    #[test]
    fn evaluator_counts_and_rejects_nan() {
        let p = make_problem("dejong", 2).unwrap();
        let mut e = Evaluator::new(&p);
        assert_eq!(e.eval(&[1.0, 2.0]).unwrap(), 5.0);
        assert!(matches!(
            e.eval(&[f64::NAN, 0.0]),
            Err(PaoError::ObjectiveEvaluation(_))
        ));
        assert_eq!(e.count(), 2);
    }

    #[test]
    fn json_line_schema() {
        let p = make_problem("schwefel", 2).unwrap();
        let mut r = Recorder::new(OptimizerId::Pao);
        r.push(&p, -800.0, &[1.0, 2.0], &[-800.0, -700.0]);
        let rec = r.finish(&p, 7, 2, 2);
        let line = rec.to_json_line().unwrap();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        let mut at = 0;
        for key in [
            "run_id",
            "optimizer",
            "problem",
            "dim",
            "seed",
            "pop",
            "gens",
            "evals",
            "history",
            "duration_ms",
        ] {
            let pos = line.find(&format!("\"{key}\":")).expect(key);
            assert!(pos >= at, "{key} out of order");
            at = pos;
        }
        assert_eq!(v.as_object().unwrap().len(), 10);
        assert_eq!(v["optimizer"], "pao");
        assert_eq!(v["gens"], 0);
        let h = &v["history"][0];
        assert_eq!(h["g"], 0);
        assert_eq!(h["mean"], -750.0);
        assert!((h["shifted_best"].as_f64().unwrap() - (-800.0 - p.optimum_val)).abs() < 1e-12);
        let back: RunRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back.history, rec.history);
    }
}
