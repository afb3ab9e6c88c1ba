//! Seeded experiment runner: suites of (optimiser, problem, repetition) runs, JSONL
//! persistence, convergence aggregation and plot-ready CSV output.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attractors::{AttractorSpec, NoiseModel};
use crate::benchmarks::{BenchmarkKind, Problem, GRIEWANGK_DENOMINATOR};
use crate::engine::{PaoConfig, VelocityInit};
use crate::error::{PaoError, Result};
use crate::kernel::Hyperparams;
use crate::optimizer::{OptimizerId, Registry};
use crate::record::RunRecord;
use crate::swarm::BoundsPolicy;

/// Repetitions used by the preset suites.
pub const DESK_REPETITIONS: usize = 20;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one run, a hash-combine of the base seed with the run's indices.
pub fn derive_seed(base: u64, optimizer: usize, problem: usize, repetition: usize) -> u64 {
    [optimizer, problem, repetition]
        .into_iter()
        .fold(splitmix64(base), |h, v| {
            splitmix64(h ^ (v as u64).wrapping_mul(GOLDEN))
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSuite {
    pub problems: Vec<(BenchmarkKind, usize)>,
    pub pop: usize,
    pub gens: usize,
    pub repetitions: usize,
    pub optimizers: Vec<OptimizerId>,
    pub base_seed: u64,
    #[serde(default = "default_griewangk")]
    pub griewangk_denominator: f64,
    /// When false, `duration_ms` is written as 0 so outputs compare byte for byte.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_griewangk() -> f64 {
    GRIEWANGK_DENOMINATOR
}

fn default_true() -> bool {
    true
}

impl BenchmarkSuite {
    /// All nine problems at the given dimensions, all five optimisers, 100 × 100.
    pub fn preset(name: &str, repetitions: usize, base_seed: u64) -> Result<Self> {
        let dims: &[usize] = match name.trim().to_ascii_lowercase().as_str() {
            "2d" => &[2],
            "8d" => &[8],
            "all" => &[2, 8],
            other => return Err(PaoError::InvalidConfig(format!("unknown suite `{other}`"))),
        };
        Ok(Self {
            problems: dims
                .iter()
                .flat_map(|d| BenchmarkKind::ALL.into_iter().map(move |k| (k, *d)))
                .collect(),
            pop: 100,
            gens: 100,
            repetitions,
            optimizers: OptimizerId::ALL.to_vec(),
            base_seed,
            griewangk_denominator: GRIEWANGK_DENOMINATOR,
            record_timing: true,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(PaoError::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.problems.is_empty() || self.optimizers.is_empty() {
            return Err(PaoError::InvalidConfig(
                "suite has no problems or no optimizers".into(),
            ));
        }
        Ok(())
    }

    pub fn run_count(&self) -> usize {
        self.problems.len() * self.optimizers.len() * self.repetitions
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub optimizer: OptimizerId,
    pub problem: String,
    pub dim: usize,
    pub runs: usize,
    pub median: f64,
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub records_path: PathBuf,
    pub records: usize,
    pub rows: Vec<SummaryRow>,
}

impl SuiteSummary {
    pub fn row(&self, optimizer: OptimizerId, problem: &str, dim: usize) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.optimizer == optimizer && r.problem == problem && r.dim == dim)
    }
}

/// Runs every (problem, optimiser, repetition) of the suite, writing one JSONL record per
/// run to `out_path` in a fixed order regardless of scheduling.
pub fn run_suite(
    suite: &BenchmarkSuite,
    registry: &Registry,
    out_path: &Path,
) -> Result<SuiteSummary> {
    suite.validate()?;
    let problems = suite
        .problems
        .iter()
        .map(|(k, d)| Problem::with_griewangk_denominator(*k, *d, suite.griewangk_denominator))
        .collect::<Result<Vec<_>>>()?;
    let optimizers = suite
        .optimizers
        .iter()
        .map(|id| {
            registry
                .get(*id)
                .ok_or_else(|| PaoError::UnknownOptimizer(id.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::with_capacity(suite.run_count());
    for (pi, _) in problems.iter().enumerate() {
        for (oi, id) in suite.optimizers.iter().enumerate() {
            for rep in 0..suite.repetitions {
                jobs.push((
                    pi,
                    oi,
                    rep,
                    derive_seed(suite.base_seed, id.index(), pi, rep),
                ));
            }
        }
    }
    let mut records = jobs
        .par_iter()
        .map(|&(pi, oi, _, seed)| optimizers[oi].run(&problems[pi], suite.pop, suite.gens, seed))
        .collect::<Result<Vec<_>>>()?;
    if !suite.record_timing {
        records.iter_mut().for_each(|r| r.duration_ms = 0);
    }
    write_records(out_path, &records)?;
    Ok(SuiteSummary {
        records_path: out_path.to_path_buf(),
        records: records.len(),
        rows: summarize(&records),
    })
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        writeln!(w, "{}", r.to_json_line()?)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records from a JSONL file, or from every `*.jsonl` file in a directory.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let files = if path.is_dir() {
        let mut v: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for f in files {
        for line in BufReader::new(File::open(&f)?).lines() {
            let line = line?;
            if !line.trim().is_empty() {
                out.push(serde_json::from_str(&line)?);
            }
        }
    }
    Ok(out)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Linearly interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}

/// Sum in sorted order so the result does not depend on record order.
fn stable_mean(sorted: &[f64]) -> f64 {
    sorted.iter().sum::<f64>() / sorted.len() as f64
}

type GroupKey = (String, usize, OptimizerId);

fn group(records: &[RunRecord]) -> BTreeMap<GroupKey, Vec<&RunRecord>> {
    let mut groups: BTreeMap<GroupKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.problem.clone(), r.dim, r.optimizer))
            .or_default()
            .push(r);
    }
    groups
}

/// Median, mean and sample standard deviation of final shifted best fitness per
/// (optimiser, problem, dimension).
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    group(records)
        .into_iter()
        .map(|((problem, dim, optimizer), rs)| {
            let finals = sorted(rs.iter().filter_map(|r| r.final_shifted_best()).collect());
            let mean = stable_mean(&finals);
            let stddev = if finals.len() > 1 {
                let ss: f64 = sorted(finals.iter().map(|v| (v - mean).powi(2)).collect())
                    .iter()
                    .sum();
                (ss / (finals.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                optimizer,
                problem,
                dim,
                runs: finals.len(),
                median: quantile(&finals, 0.5),
                mean,
                stddev,
            }
        })
        .collect()
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "optimizer,problem,dim,runs,median,mean,stddev")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.optimizer, r.problem, r.dim, r.runs, r.median, r.mean, r.stddev
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Per-generation statistics of shifted best fitness over a group of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub optimizer: OptimizerId,
    pub problem: String,
    pub dim: usize,
    pub runs: usize,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
}

pub fn aggregate_convergence(records: &[RunRecord]) -> Result<Vec<ConvergenceCurve>> {
    let mut curves = Vec::new();
    for ((problem, dim, optimizer), rs) in group(records) {
        let horizon = rs[0].history.len();
        if let Some(bad) = rs.iter().find(|r| r.history.len() != horizon) {
            return Err(PaoError::MismatchedHorizons {
                expected: horizon,
                found: bad.history.len(),
            });
        }
        let mut curve = ConvergenceCurve {
            optimizer,
            problem,
            dim,
            runs: rs.len(),
            mean: Vec::with_capacity(horizon),
            median: Vec::with_capacity(horizon),
            q25: Vec::with_capacity(horizon),
            q75: Vec::with_capacity(horizon),
        };
        for g in 0..horizon {
            let col = sorted(rs.iter().map(|r| r.history[g].shifted_best).collect());
            curve.mean.push(stable_mean(&col));
            curve.median.push(quantile(&col, 0.5));
            curve.q25.push(quantile(&col, 0.25));
            curve.q75.push(quantile(&col, 0.75));
        }
        curves.push(curve);
    }
    Ok(curves)
}

/// Writes one CSV per (problem, dimension) named `<problem>_<dim>d.csv`, with a
/// `generation` column followed by the mean curve of each optimiser. Returns the paths
/// written.
pub fn emit_plot_data(curves: &[ConvergenceCurve], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut by_problem: BTreeMap<(String, usize), Vec<&ConvergenceCurve>> = BTreeMap::new();
    for c in curves {
        by_problem
            .entry((c.problem.clone(), c.dim))
            .or_default()
            .push(c);
    }
    let mut written = Vec::new();
    for ((problem, dim), mut cs) in by_problem {
        cs.sort_by_key(|c| c.optimizer);
        let horizon = cs[0].mean.len();
        if let Some(bad) = cs.iter().find(|c| c.mean.len() != horizon) {
            return Err(PaoError::MismatchedHorizons {
                expected: horizon,
                found: bad.mean.len(),
            });
        }
        let path = out_dir.join(format!("{problem}_{dim}d.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        let header: Vec<&str> = std::iter::once("generation")
            .chain(cs.iter().map(|c| c.optimizer.name()))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for g in 0..horizon {
            let mut line = g.to_string();
            for c in &cs {
                line.push(',');
                line.push_str(&c.mean[g].to_string());
            }
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Flat key/value experiment configuration, mirroring the CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub optimizer: OptimizerId,
    pub problem: BenchmarkKind,
    pub dim: usize,
    pub pop: usize,
    pub gens: usize,
    pub reps: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub m: f64,
    pub zeta: f64,
    pub k: Vec<f64>,
    pub q0: f64,
    pub dt: f64,
    pub attractors: Vec<AttractorSpec>,
    pub bounds_policy: BoundsPolicy,
    pub velocity_init: VelocityInit,
    pub noise_model: NoiseModel,
    pub griewangk_denominator: f64,
    /// Reserved for noisy-objective wrappers; only 0 is accepted.
    pub noise_stddev: f64,
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let pao = PaoConfig::default();
        Self {
            optimizer: OptimizerId::Pao,
            problem: BenchmarkKind::DeJong,
            dim: 2,
            pop: 100,
            gens: 100,
            reps: 1,
            seed: 0,
            out: None,
            m: pao.hp.m,
            zeta: pao.hp.zeta,
            k: pao.hp.k,
            q0: pao.hp.q0,
            dt: pao.hp.dt,
            attractors: pao.specs,
            bounds_policy: pao.bounds_policy,
            velocity_init: pao.velocity_init,
            noise_model: pao.noise_model,
            griewangk_denominator: GRIEWANGK_DENOMINATOR,
            noise_stddev: 0.0,
            record_timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| PaoError::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn pao_config(&self) -> PaoConfig {
        PaoConfig {
            hp: Hyperparams {
                m: self.m,
                zeta: self.zeta,
                k: self.k.clone(),
                q0: self.q0,
                dt: self.dt,
            },
            specs: self.attractors.clone(),
            bounds_policy: self.bounds_policy,
            velocity_init: self.velocity_init,
            noise_model: self.noise_model,
        }
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::with_griewangk_denominator(self.problem, self.dim, self.griewangk_denominator)
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_stddev != 0.0 {
            return Err(PaoError::InvalidConfig(
                "noisy objectives are not available; noise_stddev must be 0".into(),
            ));
        }
        self.pao_config().validate()?;
        self.problem()?;
        Ok(())
    }

    /// A single-problem, single-optimiser suite with `reps` repetitions.
    pub fn suite(&self) -> BenchmarkSuite {
        BenchmarkSuite {
            problems: vec![(self.problem, self.dim)],
            pop: self.pop,
            gens: self.gens,
            repetitions: self.reps,
            optimizers: vec![self.optimizer],
            base_seed: self.seed,
            griewangk_denominator: self.griewangk_denominator,
            record_timing: self.record_timing,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::HistoryEntry;

    fn record(opt: OptimizerId, problem: &str, shifted: &[f64]) -> RunRecord {
        RunRecord {
            run_id: "x".into(),
            optimizer: opt,
            problem: problem.into(),
            dim: 2,
            seed: 0,
            pop: 1,
            gens: shifted.len() - 1,
            evals: shifted.len() as u64,
            history: shifted
                .iter()
                .enumerate()
                .map(|(g, v)| HistoryEntry {
                    g,
                    best: *v,
                    mean: *v,
                    shifted_best: *v,
                })
                .collect(),
            duration_ms: 0,
            best_positions: vec![],
            noise_scale: vec![],
        }
    }

    #[test]
    fn seeds_differ_by_every_index() {
        let s = derive_seed(1, 0, 0, 0);
        assert_eq!(s, derive_seed(1, 0, 0, 0));
        let others = [
            derive_seed(2, 0, 0, 0),
            derive_seed(1, 1, 0, 0),
            derive_seed(1, 0, 1, 0),
            derive_seed(1, 0, 0, 1),
        ];
        assert!(others.iter().all(|o| *o != s));
        assert_ne!(derive_seed(1, 1, 0, 0), derive_seed(1, 0, 1, 0));
    }

    #[test]
    fn presets() {
        assert_eq!(
            BenchmarkSuite::preset("2d", 20, 0).unwrap().run_count(),
            900
        );
        assert_eq!(
            BenchmarkSuite::preset("8D", 1, 0).unwrap().problems[0],
            (BenchmarkKind::DeJong, 8)
        );
        assert_eq!(
            BenchmarkSuite::preset("all", 1, 0).unwrap().problems.len(),
            18
        );
        assert!(BenchmarkSuite::preset("3d", 1, 0).is_err());
        let mut s = BenchmarkSuite::preset("2d", 1, 0).unwrap();
        s.repetitions = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
        assert_eq!(quantile(&[7.0], 0.75), 7.0);
    }

    #[test]
    fn single_record_curve_is_its_history() {
        let r = record(OptimizerId::Pso, "dejong", &[3.0, 1.0, 0.5]);
        let c = aggregate_convergence(std::slice::from_ref(&r)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].mean, vec![3.0, 1.0, 0.5]);
        let c2 = aggregate_convergence(&[r.clone(), r]).unwrap();
        assert_eq!(c2[0].mean, vec![3.0, 1.0, 0.5]);
        assert_eq!(c2[0].q25, c2[0].q75);
    }

    #[test]
    fn mismatched_horizons_rejected() {
        let a = record(OptimizerId::Pso, "dejong", &[3.0, 1.0]);
        let b = record(OptimizerId::Pso, "dejong", &[3.0, 1.0, 0.5]);
        assert!(matches!(
            aggregate_convergence(&[a.clone(), b.clone()]),
            Err(PaoError::MismatchedHorizons {
                expected: 2,
                found: 3
            })
        ));
        // different groups may differ
        let c = record(OptimizerId::De, "dejong", &[3.0, 1.0, 0.5]);
        assert!(aggregate_convergence(&[a, c]).is_ok());
    }

    #[test]
    fn summary_statistics() {
        let rs: Vec<_> = [1.0, 2.0, 6.0]
            .iter()
            .map(|v| record(OptimizerId::Pao, "ackley", &[10.0, *v]))
            .collect();
        let rows = summarize(&rs);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].median, 2.0);
        assert_eq!(rows[0].mean, 3.0);
        assert!((rows[0].stddev - (7.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn config_defaults_and_unknown_keys() {
        let c = ExperimentConfig::from_json_str(
            r#"{"problem": "Rastrigin", "attractors": ["globalbest"], "k": [2.0]}"#,
        )
        .unwrap();
        assert_eq!(c.problem, BenchmarkKind::Rastrigin);
        assert_eq!(c.pao_config().specs, vec![AttractorSpec::GlobalBest]);
        assert_eq!(c.pop, 100);
        assert!(c.validate().is_ok());
        assert!(ExperimentConfig::from_json_str(r#"{"popsize": 3}"#).is_err());
        let noisy = ExperimentConfig {
            noise_stddev: 0.1,
            ..ExperimentConfig::default()
        };
        assert!(noisy.validate().is_err());
    }
}
