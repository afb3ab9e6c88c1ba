//! The nine benchmark objectives, with their search domains and known minimisers.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{PaoError, Result};

/// Location of the Schwefel minimum in each coordinate.
pub const SCHWEFEL_OPTIMUM: f64 = 420.968746;

/// Denominator of the quadratic Griewangk term as printed in the original benchmark table.
pub const GRIEWANGK_DENOMINATOR: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkKind {
    DeJong,
    HyperEllipsoid,
    RotatedHyperEllipsoid,
    PowerSum,
    Rosenbrock,
    Griewangk,
    Rastrigin,
    Ackley,
    Schwefel,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 9] = [
        BenchmarkKind::DeJong,
        BenchmarkKind::HyperEllipsoid,
        BenchmarkKind::RotatedHyperEllipsoid,
        BenchmarkKind::PowerSum,
        BenchmarkKind::Rosenbrock,
        BenchmarkKind::Griewangk,
        BenchmarkKind::Rastrigin,
        BenchmarkKind::Ackley,
        BenchmarkKind::Schwefel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::DeJong => "dejong",
            BenchmarkKind::HyperEllipsoid => "hyperellipsoid",
            BenchmarkKind::RotatedHyperEllipsoid => "rotatedhyperellipsoid",
            BenchmarkKind::PowerSum => "powersum",
            BenchmarkKind::Rosenbrock => "rosenbrock",
            BenchmarkKind::Griewangk => "griewangk",
            BenchmarkKind::Rastrigin => "rastrigin",
            BenchmarkKind::Ackley => "ackley",
            BenchmarkKind::Schwefel => "schwefel",
        }
    }

    /// Symmetric domain half-width.
    pub fn half_width(self) -> f64 {
        match self {
            BenchmarkKind::DeJong | BenchmarkKind::HyperEllipsoid | BenchmarkKind::Rastrigin => {
                5.12
            }
            BenchmarkKind::RotatedHyperEllipsoid => 65.54,
            BenchmarkKind::PowerSum => 1.0,
            BenchmarkKind::Rosenbrock => 2.048,
            BenchmarkKind::Griewangk => 600.0,
            BenchmarkKind::Ackley => 32.77,
            BenchmarkKind::Schwefel => 500.0,
        }
    }

    /// Smallest dimension the problem is defined for.
    pub fn min_dim(self) -> usize {
        match self {
            BenchmarkKind::Rosenbrock => 2,
            _ => 1,
        }
    }

    fn optimum_coord(self) -> f64 {
        match self {
            BenchmarkKind::Rosenbrock => 1.0,
            BenchmarkKind::Schwefel => SCHWEFEL_OPTIMUM,
            _ => 0.0,
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkKind {
    type Err = PaoError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        BenchmarkKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| PaoError::UnknownProblem(s.to_string()))
    }
}

/// A benchmark instance in a fixed dimension.
///
/// `offset` translates the whole problem: the objective becomes `f(x − offset)` and the
/// bounds and minimiser move with it.
/// Accepts any casing, like the command line.
impl<'de> Deserialize<'de> for BenchmarkKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub kind: BenchmarkKind,
    pub dim: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub optimum_pos: Vec<f64>,
    pub optimum_val: f64,
    pub griewangk_denominator: f64,
    offset: Option<Vec<f64>>,
}

pub fn make_problem(name: &str, dim: usize) -> Result<Problem> {
    Problem::new(name.parse()?, dim)
}

impl Problem {
    pub fn new(kind: BenchmarkKind, dim: usize) -> Result<Self> {
        Self::with_griewangk_denominator(kind, dim, GRIEWANGK_DENOMINATOR)
    }

    pub fn with_griewangk_denominator(kind: BenchmarkKind, dim: usize, denom: f64) -> Result<Self> {
        if dim < kind.min_dim() {
            return Err(PaoError::InvalidDimension {
                problem: kind.name().to_string(),
                dim,
            });
        }
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(PaoError::InvalidConfig(format!(
                "griewangk denominator must be positive, got {denom}"
            )));
        }
        let w = kind.half_width();
        let mut p = Problem {
            kind,
            dim,
            lower: vec![-w; dim],
            upper: vec![w; dim],
            optimum_pos: vec![kind.optimum_coord(); dim],
            optimum_val: 0.0,
            griewangk_denominator: denom,
            offset: None,
        };
        // Schwefel's minimum is only known numerically, so its value is taken from the
        // objective itself; every other minimum is exactly zero.
        p.optimum_val = p.evaluate(&p.optimum_pos);
        if kind != BenchmarkKind::Schwefel && p.optimum_val.abs() > 1e-9 {
            return Err(PaoError::NumericalFailure(format!(
                "{kind} does not vanish at its minimiser ({})",
                p.optimum_val
            )));
        }
        Ok(p)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// The same problem with its landscape moved by `v`.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(PaoError::InvalidConfig(format!(
                "translation has {} components for a {}-dimensional problem",
                v.len(),
                self.dim
            )));
        }
        let shift = |xs: &[f64]| xs.iter().zip(v).map(|(x, d)| x + d).collect::<Vec<_>>();
        let total = match &self.offset {
            Some(o) => o.iter().zip(v).map(|(a, b)| a + b).collect(),
            None => v.to_vec(),
        };
        Ok(Problem {
            lower: shift(&self.lower),
            upper: shift(&self.upper),
            optimum_pos: shift(&self.optimum_pos),
            offset: Some(total),
            ..self.clone()
        })
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.offset {
            None => self.raw(x),
            Some(o) => {
                let y: Vec<f64> = x.iter().zip(o).map(|(a, b)| a - b).collect();
                self.raw(&y)
            }
        }
    }

    /// Objective value relative to the known minimum.
    pub fn shift_to_zero(&self, value: f64) -> f64 {
        value - self.optimum_val
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    fn raw(&self, x: &[f64]) -> f64 {
        let n = x.len() as f64;
        match self.kind {
            BenchmarkKind::DeJong => x.iter().map(|v| v * v).sum(),
            BenchmarkKind::HyperEllipsoid => x
                .iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * v * v)
                .sum(),
            BenchmarkKind::RotatedHyperEllipsoid => {
                let mut partial = 0.0;
                let mut total = 0.0;
                for v in x {
                    partial += v * v;
                    total += partial;
                }
                total
            }
            BenchmarkKind::PowerSum => x
                .iter()
                .enumerate()
                .map(|(i, v)| v.abs().powi(i as i32 + 2))
                .sum(),
            BenchmarkKind::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            BenchmarkKind::Griewangk => {
                let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / self.griewangk_denominator;
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                sum - prod + 1.0
            }
            BenchmarkKind::Rastrigin => {
                10.0 * n
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            BenchmarkKind::Ackley => {
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            BenchmarkKind::Schwefel => x.iter().map(|v| -v * v.abs().sqrt().sin()).sum(),
        }
    }
}
