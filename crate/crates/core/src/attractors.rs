//! Attraction points, their stiffness-weighted centroid, and the swarm noise measure.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Array3, Axis};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{PaoError, Result};
use crate::swarm::Swarm;

/// Differential weight of the rand/1 donor used as an attractor.
pub const DE_ATTRACTOR_WEIGHT: f64 = 0.5;

const SOFTMAX_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttractorSpec {
    GlobalBest,
    LocalBest,
    AverageLocalBest,
    AverageParticle,
    WeightedAverageParticle,
    DeRand1Bin,
    /// Global best perturbed by independent Gaussian noise with this standard deviation.
    StochasticGaussian(f64),
}

impl AttractorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AttractorSpec::StochasticGaussian(sd) if !(sd >= 0.0 && sd.is_finite()) => {
                Err(PaoError::InvalidConfig(format!(
                    "stochastic attractor stddev must be >= 0, got {sd}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether the attractor is the same point for every particle.
    pub fn is_broadcast(&self) -> bool {
        matches!(
            self,
            AttractorSpec::GlobalBest
                | AttractorSpec::AverageLocalBest
                | AttractorSpec::AverageParticle
                | AttractorSpec::WeightedAverageParticle
        )
    }
}

impl fmt::Display for AttractorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttractorSpec::GlobalBest => f.write_str("globalbest"),
            AttractorSpec::LocalBest => f.write_str("localbest"),
            AttractorSpec::AverageLocalBest => f.write_str("averagelocalbest"),
            AttractorSpec::AverageParticle => f.write_str("averageparticle"),
            AttractorSpec::WeightedAverageParticle => f.write_str("weightedaverageparticle"),
            AttractorSpec::DeRand1Bin => f.write_str("derand1bin"),
            AttractorSpec::StochasticGaussian(sd) => write!(f, "stochasticgaussian({sd})"),
        }
    }
}

/// Accepts the kind names case-insensitively, ignoring `_`, `-` and `/`.
/// The stochastic kind takes its deviation as `stochasticgaussian(0.1)` or
/// `stochasticgaussian:0.1`.
impl FromStr for AttractorSpec {
    type Err = PaoError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, arg) = match lower.find([':', '=', '(']) {
            Some(at) => (
                &lower[..at],
                Some(lower[at + 1..].trim_end_matches(')').trim()),
            ),
            None => (lower.as_str(), None),
        };
        let key: String = name
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | '/' | ' '))
            .collect();
        if arg.is_some() && key != "stochasticgaussian" {
            return Err(PaoError::UnknownAttractor(s.to_string()));
        }
        let spec = match key.as_str() {
            "globalbest" => AttractorSpec::GlobalBest,
            "localbest" => AttractorSpec::LocalBest,
            "averagelocalbest" => AttractorSpec::AverageLocalBest,
            "averageparticle" => AttractorSpec::AverageParticle,
            "weightedaverageparticle" => AttractorSpec::WeightedAverageParticle,
            "derand1bin" => AttractorSpec::DeRand1Bin,
            "stochasticgaussian" => {
                let sd: f64 = arg
                    .ok_or_else(|| PaoError::UnknownAttractor(s.to_string()))?
                    .parse()
                    .map_err(|_| PaoError::UnknownAttractor(s.to_string()))?;
                AttractorSpec::StochasticGaussian(sd)
            }
            _ => return Err(PaoError::UnknownAttractor(s.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for AttractorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AttractorSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `alpha[[r, i, j]]`: attractor `r` for element `j` of particle `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorSet {
    pub alpha: Array3<f64>,
    pub k: Vec<f64>,
}

pub fn compute_attractors<R: Rng + ?Sized>(
    swarm: &Swarm,
    specs: &[AttractorSpec],
    k: &[f64],
    rng: &mut R,
) -> Result<AttractorSet> {
    if specs.len() != k.len() {
        return Err(PaoError::InvalidConfig(format!(
            "{} attractors but {} stiffnesses",
            specs.len(),
            k.len()
        )));
    }
    let (n, d) = (swarm.len(), swarm.dim());
    let mut alpha = Array3::zeros((specs.len(), n, d));
    for (r, spec) in specs.iter().enumerate() {
        spec.validate()?;
        let mut slice = alpha.index_axis_mut(Axis(0), r);
        match *spec {
            AttractorSpec::GlobalBest => slice.assign(&swarm.global_best_pos),
            AttractorSpec::LocalBest => slice.assign(&swarm.local_best_pos),
            AttractorSpec::AverageLocalBest => slice.assign(
                &swarm
                    .local_best_pos
                    .mean_axis(Axis(0))
                    .expect("non-empty swarm"),
            ),
            AttractorSpec::AverageParticle => slice.assign(&swarm.mean_position()),
            AttractorSpec::WeightedAverageParticle => {
                let w = fitness_weights(swarm.fitness.as_slice().expect("contiguous"));
                let pos = swarm.positions();
                let mean = w
                    .iter()
                    .zip(pos.outer_iter())
                    .fold(ndarray::Array1::zeros(d), |acc, (wi, row)| acc + &row * *wi);
                slice.assign(&mean);
            }
            AttractorSpec::DeRand1Bin => {
                if n < 4 {
                    return Err(PaoError::InsufficientPopulation {
                        what: "rand/1 attractor",
                        needed: 4,
                        got: n,
                    });
                }
                let pos = swarm.positions();
                for i in 0..n {
                    let picks = index::sample(rng, n - 1, 3);
                    let idx: Vec<usize> = picks
                        .iter()
                        .map(|p| if p >= i { p + 1 } else { p })
                        .collect();
                    let (a, b, c) = (pos.row(idx[0]), pos.row(idx[1]), pos.row(idx[2]));
                    for j in 0..d {
                        slice[[i, j]] = a[j] + DE_ATTRACTOR_WEIGHT * (b[j] - c[j]);
                    }
                }
            }
            AttractorSpec::StochasticGaussian(sd) => {
                for i in 0..n {
                    for j in 0..d {
                        let z: f64 = rng.sample(StandardNormal);
                        slice[[i, j]] = swarm.global_best_pos[j] + sd * z;
                    }
                }
            }
        }
    }
    Ok(AttractorSet {
        alpha,
        k: k.to_vec(),
    })
}

/// Softmax weights of negated, range-normalised fitness (lower fitness, larger weight).
fn fitness_weights(fitness: &[f64]) -> Vec<f64> {
    let lo = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo + SOFTMAX_EPS;
    let raw: Vec<f64> = fitness.iter().map(|f| (-(f - lo) / span).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// `(1/k') Σ_r k_r α_r` per particle and element.
pub fn weighted_centroid(aset: &AttractorSet) -> Array2<f64> {
    let (_, n, d) = aset.alpha.dim();
    let total: f64 = aset.k.iter().sum();
    let mut out = Array2::zeros((n, d));
    for (kr, slice) in aset.k.iter().zip(aset.alpha.outer_iter()) {
        out.scaled_add(*kr / total, &slice);
    }
    out
}

/// How the noise intensity `ν` of each element is derived from the swarm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// One scalar per generation: [`noise_scale`], shared by every element.
    SwarmSpread,
    /// Per particle and element: `(local_best_ij − global_best_j)²`.
    #[default]
    LocalGlobalGap,
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseModel::SwarmSpread => "swarm-spread",
            NoiseModel::LocalGlobalGap => "local-global-gap",
        })
    }
}

impl FromStr for NoiseModel {
    type Err = PaoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "swarm-spread" => Ok(NoiseModel::SwarmSpread),
            "local-global-gap" => Ok(NoiseModel::LocalGlobalGap),
            other => Err(PaoError::InvalidConfig(format!(
                "unknown noise model `{other}`"
            ))),
        }
    }
}

/// `ν` for every element of every particle under `model`, as an `N × D` array.
pub fn noise_field(swarm: &Swarm, model: NoiseModel) -> Array2<f64> {
    let (n, d) = (swarm.len(), swarm.dim());
    match model {
        NoiseModel::SwarmSpread => Array2::from_elem((n, d), noise_scale(swarm)),
        NoiseModel::LocalGlobalGap => {
            let mut out = swarm.local_best_pos.clone();
            for mut row in out.outer_iter_mut() {
                row.zip_mut_with(&swarm.global_best_pos, |l, g| *l = (*l - g).powi(2));
            }
            out
        }
    }
}

/// Squared distance between the mean particle position and the global best.
pub fn noise_scale(swarm: &Swarm) -> f64 {
    swarm
        .mean_position()
        .iter()
        .zip(swarm.global_best_pos.iter())
        .map(|(m, g)| (m - g).powi(2))
        .sum()
}
