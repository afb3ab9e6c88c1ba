//! Particle attractor optimisation (PAO): a particle swarm whose per-element dynamics are
//! an exactly discretised linear stochastic oscillator, so every generation has a
//! closed-form Gaussian transition density.
//!
//! Also provides the comparison optimisers (PSO, QPSO, DE, SADE), the nine benchmark
//! problems, and a seeded experiment harness.

// Negated comparisons such as `!(dt > 0.0)` are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attractors;
pub mod baselines;
pub mod benchmarks;
pub mod engine;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod linalg;
pub mod optimizer;
pub mod record;
pub mod swarm;

pub use attractors::{
    compute_attractors, noise_field, noise_scale, weighted_centroid, AttractorSet, AttractorSpec,
    NoiseModel,
};
pub use benchmarks::{make_problem, BenchmarkKind, Problem};
pub use engine::{initialize_swarm, run_pao, step_swarm, Pao, PaoConfig, VelocityInit};
pub use error::{PaoError, Result};
pub use kernel::{
    build_drift_matrix, build_kernel, matrix_fraction_decomposition, sample_transition,
    transition_logpdf, DriftMatrix, Hyperparams, TransitionKernel,
};
pub use optimizer::{Optimizer, OptimizerId, Registry};
pub use record::{Evaluator, HistoryEntry, RunRecord};
pub use swarm::{BoundsPolicy, Swarm};
