//! Common run interface for every optimiser and a name-keyed registry of them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{De, DeConfig, Pso, PsoConfig, Qpso, QpsoConfig, Sade, SadeConfig};
use crate::benchmarks::Problem;
use crate::engine::{Pao, PaoConfig};
use crate::error::{PaoError, Result};
use crate::record::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerId {
    Pao,
    Pso,
    Qpso,
    De,
    Sade,
}

impl OptimizerId {
    pub const ALL: [OptimizerId; 5] = [
        OptimizerId::Pao,
        OptimizerId::Pso,
        OptimizerId::Qpso,
        OptimizerId::De,
        OptimizerId::Sade,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerId::Pao => "pao",
            OptimizerId::Pso => "pso",
            OptimizerId::Qpso => "qpso",
            OptimizerId::De => "de",
            OptimizerId::Sade => "sade",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OptimizerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerId {
    type Err = PaoError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        OptimizerId::ALL
            .into_iter()
            .find(|o| o.name() == key)
            .ok_or_else(|| PaoError::UnknownOptimizer(s.to_string()))
    }
}

/// A population-based optimiser under the shared run contract: `pop·(gens + 1)`
/// objective evaluations, one history entry per generation including the initial one,
/// non-increasing best fitness, and bitwise reproducibility from `seed`.
pub trait Optimizer: Send + Sync {
    fn id(&self) -> OptimizerId;

    fn run(&self, problem: &Problem, pop: usize, gens: usize, seed: u64) -> Result<RunRecord>;
}

/// Optimisers keyed by their id, one entry per id.
#[derive(Default)]
pub struct Registry {
    entries: Vec<Box<dyn Optimizer>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// All five optimisers with their default settings.
    pub fn with_defaults() -> Self {
        Self::with_pao(PaoConfig::default())
    }

    pub fn with_pao(cfg: PaoConfig) -> Self {
        let mut r = Self::new();
        r.register(Box::new(Pao::new(cfg)));
        r.register(Box::new(Pso::new(PsoConfig::default())));
        r.register(Box::new(Qpso::new(QpsoConfig::default())));
        r.register(Box::new(De::new(DeConfig::default())));
        r.register(Box::new(Sade::new(SadeConfig::default())));
        r
    }

    /// Adds an optimiser, replacing any existing entry with the same id.
    pub fn register(&mut self, opt: Box<dyn Optimizer>) {
        let id = opt.id();
        match self.entries.iter_mut().find(|e| e.id() == id) {
            Some(slot) => *slot = opt,
            None => self.entries.push(opt),
        }
    }

    pub fn get(&self, id: OptimizerId) -> Option<&dyn Optimizer> {
        self.entries
            .iter()
            .find(|e| e.id() == id)
            .map(|b| b.as_ref())
    }

    pub fn by_name(&self, name: &str) -> Result<&dyn Optimizer> {
        let id: OptimizerId = name.parse()?;
        self.get(id)
            .ok_or_else(|| PaoError::UnknownOptimizer(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = OptimizerId> + '_ {
        self.entries.iter().map(|e| e.id())
    }
}
